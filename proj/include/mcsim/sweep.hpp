#pragma once

#include <atomic>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "mcsim/engine_async.hpp"
#include "mcsim/engine_sync.hpp"
#include "mcsim/instance.hpp"
#include "mcsim/params.hpp"
#include "mcsim/protocols/registry.hpp"

namespace mcsim {

// A sweep over (protocol, n, p, repetition). Rows are a pure function of the
// config: each run derives its own RNG stream from (seed_base, protocol, n,
// p, rep), so results do not depend on worker count or scheduling.
struct ExperimentConfig {
    ProtocolId protocol = ProtocolId::SimpleAsync;
    std::vector<std::uint64_t> n_list;
    std::vector<double> p_list;
    double epsilon = 0.2;
    std::uint64_t seed_base = 1;
    std::uint64_t repetitions = 1;
    std::string preset = "desk";
    Overrides overrides;          // applied on top of the preset
    double horizon_factor = 1.0;  // multiplies the protocol's default horizon
    bool audits = true;           // collect per-run observed-state sets
    int majority_bit = 0;
    unsigned jobs = 0;  // 0 = hardware concurrency
    std::string out_csv;
    std::string out_meta;

    void validate() const {
        if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
        if (n_list.empty() || p_list.empty()) throw std::invalid_argument("empty n or p list");
        for (auto n : n_list)
            if (n < 16) throw std::invalid_argument("all n must be >= 16");
        if (horizon_factor <= 0.0) throw std::invalid_argument("horizon_factor must be positive");
    }
};

struct SweepRow {
    std::string protocol;
    std::string preset;
    std::string model;
    std::uint64_t n = 0;
    double p_target = 0.0;
    double p_realized = 0.0;
    double epsilon = 0.0;
    std::uint64_t rep = 0;
    std::uint64_t seed = 0;
    bool error = false;
    SimResult r;
    std::uint64_t experts_level0 = 0;
    std::uint64_t experts_total = 0;
    std::uint64_t states_used = 0;
};

inline std::uint64_t run_seed_for(const ExperimentConfig& cfg, std::uint64_t n, double p,
                                  std::uint64_t rep) {
    std::uint64_t h = hash_combine(cfg.seed_base, hash_str(to_string(cfg.protocol)));
    h = hash_combine(h, n);
    std::uint64_t pbits;
    static_assert(sizeof(pbits) == sizeof(p));
    std::memcpy(&pbits, &p, sizeof(pbits));
    h = hash_combine(h, pbits);
    h = hash_combine(h, rep);
    return h;
}

namespace detail {

template <Protocol P>
SimResult dispatch_run(const P& protocol, ProtocolId id, const Instance& inst, std::uint64_t seed,
                       double horizon, bool audits) {
    if (uses_sync_engine(id)) {
        SyncSimConfig scfg;
        scfg.seed = seed;
        scfg.max_rounds = static_cast<std::uint64_t>(horizon);
        scfg.collect_states = audits;
        return run_sync(protocol, inst, scfg);
    }
    AsyncSimConfig acfg;
    acfg.seed = seed;
    acfg.horizon = horizon;
    acfg.collect_states = audits;
    return run_async(protocol, inst, acfg);
}

}  // namespace detail

inline SweepRow run_one(const ExperimentConfig& cfg, const ParamSet& params,
                        const AnyProtocol& protocol, std::uint64_t n, double p, std::uint64_t rep) {
    SweepRow row;
    row.protocol = to_string(cfg.protocol);
    row.preset = cfg.preset;
    row.model = uses_sync_engine(cfg.protocol) ? "sync" : "async";
    row.n = n;
    row.p_target = p;
    row.epsilon = cfg.epsilon;
    row.rep = rep;
    row.seed = run_seed_for(cfg, n, p, rep);
    try {
        Instance inst = make_instance(n, p, row.seed, cfg.majority_bit);
        row.p_realized = inst.advantage_fraction;
        const double horizon = default_horizon(params) * cfg.horizon_factor;
        row.r = std::visit(
            [&](const auto& proto) {
                return detail::dispatch_run(proto, cfg.protocol, inst, row.seed, horizon, cfg.audits);
            },
            protocol);
        row.states_used = row.r.states_observed.size();
        switch (cfg.protocol) {
            case ProtocolId::SimpleAsync:
                row.experts_level0 = row.r.audit_entries[1];
                row.experts_total = row.r.audit_entries[1];
                break;
            case ProtocolId::Sync:
                row.experts_level0 = row.r.audit_entries[1];
                row.experts_total = row.r.audit_entries[1] + row.r.audit_entries[2];
                break;
            case ProtocolId::FullAsync:
                row.experts_level0 = row.r.audit_entries[1] + row.r.audit_entries[2] +
                                     row.r.audit_entries[3] + row.r.audit_entries[4];
                row.experts_total = row.experts_level0 + row.r.audit_entries[5];
                break;
            default:
                break;
        }
    } catch (const std::exception&) {
        row.error = true;
    }
    return row;
}

// Runs the full grid on a small worker pool. Rows come back in canonical
// order (n, then p, then rep) regardless of the number of workers.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Cell {
        std::uint64_t n;
        double p;
        std::uint64_t rep;
    };
    std::vector<Cell> cells;
    for (auto n : cfg.n_list)
        for (double p : cfg.p_list)
            for (std::uint64_t rep = 0; rep < cfg.repetitions; ++rep) cells.push_back({n, p, rep});

    // params and protocol instances are immutable and shared across workers
    std::vector<ParamSet> params_by_n;
    std::vector<AnyProtocol> proto_by_n;
    for (auto n : cfg.n_list) {
        ParamSet ps = derive_params_preset(cfg.protocol, n, cfg.epsilon, cfg.preset, cfg.overrides);
        proto_by_n.push_back(make_protocol(ps));
        params_by_n.push_back(std::move(ps));
    }
    auto n_index = [&](std::uint64_t n) {
        for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
            if (cfg.n_list[i] == n) return i;
        return std::size_t{0};
    };

    std::vector<SweepRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<std::size_t>(jobs, cells.size());
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const auto& c = cells[i];
            const std::size_t k = n_index(c.n);
            rows[i] = run_one(cfg, params_by_n[k], proto_by_n[k], c.n, c.p, c.rep);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

inline const char* kCsvHeader =
    "protocol,preset,model,n,p_target,p_realized,epsilon,rep,seed,success,"
    "censored_consensus,censored_terminal,communications_total,communications_at_consensus,"
    "communications_at_terminal,consensus_time,terminal_time,final_incorrect,states_used,"
    "events_processed,experts_level0,experts_total,spread_threshold_time,"
    "comm_aspirant,comm_expert,comm_regular,comm_informed,comm_other,error";

inline std::string csv_field(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string to_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    for (const auto& row : rows) {
        const auto& r = row.r;
        os << row.protocol << ',' << row.preset << ',' << row.model << ',' << row.n << ','
           << csv_field(row.p_target) << ',' << csv_field(row.p_realized) << ','
           << csv_field(row.epsilon) << ',' << row.rep << ',' << row.seed << ','
           << (r.success() ? 1 : 0) << ',' << (r.consensus_censored ? 1 : 0) << ','
           << (r.terminal_censored ? 1 : 0) << ',' << r.communications_total << ','
           << r.communications_at_consensus << ',' << r.communications_at_terminal << ','
           << csv_field(r.consensus_time) << ',' << csv_field(r.terminal_time) << ','
           << r.final_incorrect_count << ',' << row.states_used << ',' << r.events_processed << ','
           << row.experts_level0 << ',' << row.experts_total << ','
           << csv_field(r.spread_threshold_time) << ',' << r.per_type_comm_counts[1] << ','
           << r.per_type_comm_counts[2] << ',' << r.per_type_comm_counts[3] << ','
           << r.per_type_comm_counts[6] << ','
           << (r.per_type_comm_counts[4] + r.per_type_comm_counts[5] + r.per_type_comm_counts[7])
           << ',' << (row.error ? 1 : 0) << "\n";
    }
    return os.str();
}

}  // namespace mcsim
