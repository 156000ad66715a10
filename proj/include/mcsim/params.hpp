#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsim {

enum class ProtocolId { SimpleAsync, Sync, FullAsync, Baseline3State };

inline std::string to_string(ProtocolId id) {
    switch (id) {
        case ProtocolId::SimpleAsync: return "simple-async";
        case ProtocolId::Sync: return "sync";
        case ProtocolId::FullAsync: return "full-async";
        case ProtocolId::Baseline3State: return "baseline-3state";
    }
    return "?";
}

inline ProtocolId protocol_id_from_string(const std::string& s) {
    if (s == "simple-async") return ProtocolId::SimpleAsync;
    if (s == "sync") return ProtocolId::Sync;
    if (s == "full-async") return ProtocolId::FullAsync;
    if (s == "baseline-3state") return ProtocolId::Baseline3State;
    throw std::invalid_argument("unknown protocol id: " + s);
}

// All logarithms are base 2. Derived quantities of the form ceil(x) are
// computed with a small relative snap so that values which are integers in
// exact arithmetic (e.g. log2 log2 65536 = 4) do not ceil upward due to
// floating point noise.
inline double snap(double v) {
    double r = std::round(v);
    if (std::abs(v - r) < 1e-9 * std::max(1.0, std::abs(v))) return r;
    return v;
}

inline std::int64_t ceil_snap(double v) { return static_cast<std::int64_t>(std::ceil(snap(v))); }

inline double log2_of(double x) { return snap(std::log2(x)); }

inline double loglog2_of(double n) { return snap(std::log2(log2_of(n))); }

// C0 = 10 / eps^2, the simple asynchronous protocol's polling constant.
inline double c0_of(double epsilon) { return 10.0 / (epsilon * epsilon); }

using Overrides = std::map<std::string, double>;

// Scale factors applied to the large proof constants. A factor of 1 keeps
// the defining formula untouched.
struct Scales {
    double c0 = 1.0;          // simple-async: C0 = 10/eps^2
    double sel_phase = 1.0;   // sync: expert-selection phase length 300 eps^-2 K
    double k = 1.0;           // sync/full-async: round counter K
    double k_sel = 1.0;       // sync/full-async: expert-selection threshold K
    double m = 1.0;           // sync/full-async: number of estimation levels M
    double t_aspirant = 1.0;  // full-async: waiting phase length
    double expiry = 1.0;      // full-async: candidate expiry 2 t_M
    double pull = 1.0;        // sync: pull interval 3MK
};

struct ParamSet {
    ProtocolId protocol_id{};
    std::uint64_t n = 0;
    double epsilon = 0.0;
    std::string preset = "paper";
    Scales scales;

    double log2_n = 0.0;          // log2 n
    std::int64_t loglog_ceil = 0; // ceil(log2 log2 n)

    // simple-async
    double c0_eff = 0.0;             // scaled C0
    std::int64_t aspirant_target = 0; // ceil(log2 log2 n)
    std::int64_t expert_poll_max = 0; // ceil(C0 log2 n)
    double expert_threshold = 0.0;    // C0 log2 n / 2
    std::int64_t push_len = 0;        // ceil(log2 n)
    std::int64_t regular_period = 0;  // ceil(log2 n)

    // sync + full-async
    std::int64_t m_levels = 0;      // M
    std::int64_t k_round = 0;       // K as used in counters / round lengths
    std::int64_t k_sel = 0;         // K as used by the selection game
    std::int64_t round_len = 0;     // sync: 2K+3
    std::int64_t sel_phase_len = 0; // sync: ceil(300 eps^-2 K_sel * scale)
    std::int64_t pull_interval = 0; // sync: 3MK; full-async: ceil((log2 log2 n)^2)

    // full-async
    std::int64_t t_aspirant = 0;
    std::int64_t expert_counter_max = 0;       // 2K+7
    std::vector<std::int64_t> t_m_schedule;    // t_m = 6T + 7Km, m = 0..M
    std::int64_t candidate_expiry = 0;         // 2 t_M (scaled)

    // number of encodable states in the declared universe
    std::uint64_t universe_size = 0;
};

inline Scales scales_from_overrides(const Overrides& ov) {
    Scales s;
    for (const auto& [key, val] : ov) {
        if (val <= 0.0) throw std::invalid_argument("override " + key + " must be positive");
        if (key == "c0_scale") s.c0 = val;
        else if (key == "sel_scale") s.sel_phase = val;
        else if (key == "k_scale") s.k = val;
        else if (key == "k_sel_scale") s.k_sel = val;
        else if (key == "m_scale") s.m = val;
        else if (key == "t_aspirant_scale") s.t_aspirant = val;
        else if (key == "expiry_scale") s.expiry = val;
        else if (key == "pull_scale") s.pull = val;
        else if (key == "horizon_factor") { /* consumed by the harness */ }
        else throw std::invalid_argument("unknown override: " + key);
    }
    return s;
}

// The "desk" preset scales the loose proof constants so that full experiments
// run at workstation scale. Protocol mechanics are identical under any
// override; only the named constants change.
inline Overrides preset_overrides(ProtocolId id, const std::string& preset) {
    if (preset == "paper") return {};
    if (preset != "desk") throw std::invalid_argument("unknown preset: " + preset);
    switch (id) {
        case ProtocolId::SimpleAsync:
            return {{"c0_scale", 0.1}};
        case ProtocolId::Sync:
            // K_sel -> 1 keeps the expert population macroscopic at desk n,
            // and the rumor-doubling window needs K above K_sel so that the
            // per-round collision losses cannot starve the next level;
            // pull_scale keeps regular nodes silent through estimation.
            return {{"sel_scale", 0.05}, {"k_scale", 0.2}, {"k_sel_scale", 0.05}, {"pull_scale", 2.0}};
        case ProtocolId::FullAsync:
            // Each estimation level permanently retires its experts (psi = 1),
            // so desk-scale populations can only sustain a single level; the
            // selection threshold K_sel tunes how many level-1 seeds appear.
            return {{"t_aspirant_scale", 0.01}, {"k_scale", 0.04}, {"k_sel_scale", 0.08},
                    {"m_scale", 0.125}, {"expiry_scale", 0.15}};
        case ProtocolId::Baseline3State:
            return {};
    }
    return {};
}

inline ParamSet derive_params(ProtocolId id, std::uint64_t n, double epsilon,
                              const Overrides& overrides = {}, const std::string& preset_name = "") {
    if (n < 16) throw std::invalid_argument("n must be at least 16");
    if (!(epsilon > 0.0 && epsilon < 0.25)) throw std::invalid_argument("epsilon must be in (0, 1/4)");

    ParamSet p;
    p.protocol_id = id;
    p.n = n;
    p.epsilon = epsilon;
    p.preset = preset_name.empty() ? "custom" : preset_name;
    p.scales = scales_from_overrides(overrides);

    const double lg = log2_of(static_cast<double>(n));
    const double llg = loglog2_of(static_cast<double>(n));
    p.log2_n = lg;
    p.loglog_ceil = ceil_snap(llg);

    auto check_pos = [](std::int64_t v, const char* what) {
        if (v < 1) throw std::invalid_argument(std::string("derived constant not positive: ") + what);
    };

    switch (id) {
        case ProtocolId::SimpleAsync: {
            p.c0_eff = snap(c0_of(epsilon) * p.scales.c0);
            p.aspirant_target = p.loglog_ceil;
            p.expert_poll_max = ceil_snap(p.c0_eff * lg);
            p.expert_threshold = snap(p.c0_eff * lg / 2.0);
            p.push_len = ceil_snap(lg);
            p.regular_period = ceil_snap(lg);
            check_pos(p.aspirant_target, "aspirant_target");
            check_pos(p.expert_poll_max, "expert_poll_max");
            check_pos(p.push_len, "push_len");
            if (p.expert_poll_max < p.push_len)
                throw std::invalid_argument("C0 scale too small: expert counter range below push length");
            // aspirant + expert + regular + terminal families
            p.universe_size = 6ull * p.aspirant_target +
                              4ull * p.expert_poll_max * p.expert_poll_max +
                              2ull * p.regular_period + 2ull;
            break;
        }
        case ProtocolId::Sync: {
            p.m_levels = ceil_snap(2.0 * llg * p.scales.m);
            p.k_round = ceil_snap(5.0 * llg * p.scales.k);
            p.k_sel = ceil_snap(5.0 * llg * p.scales.k_sel);
            p.round_len = 2 * p.k_round + 3;
            p.sel_phase_len = ceil_snap(300.0 / (epsilon * epsilon) * p.k_sel * p.scales.sel_phase);
            p.pull_interval = ceil_snap(3.0 * p.m_levels * p.k_round * p.scales.pull);
            check_pos(p.m_levels, "M");
            check_pos(p.k_round, "K");
            check_pos(p.k_sel, "K_sel");
            check_pos(p.pull_interval, "pull_interval");
            if (p.sel_phase_len < 6)
                throw std::invalid_argument("selection phase too short (needs the 4 handshake steps)");
            p.universe_size = 8ull * p.sel_phase_len * (p.k_sel + 1) * 3 * 2 +  // aspirant
                              static_cast<std::uint64_t>(p.m_levels + 1) * p.round_len * 2 +  // expert
                              2ull * p.pull_interval +  // regular
                              2 + 6 + 2;                // terminal, candidate, informed
            break;
        }
        case ProtocolId::FullAsync: {
            p.m_levels = ceil_snap(2.0 * llg * p.scales.m);
            p.k_round = ceil_snap(6.0 * llg * p.scales.k);
            p.k_sel = ceil_snap(6.0 * llg * p.scales.k_sel);
            p.t_aspirant = ceil_snap(5000.0 / epsilon * llg * p.scales.t_aspirant);
            p.expert_counter_max = 2 * p.k_round + 7;
            p.pull_interval = ceil_snap(llg * llg);
            check_pos(p.m_levels, "M");
            check_pos(p.k_round, "K");
            check_pos(p.k_sel, "K_sel");
            check_pos(p.t_aspirant, "T_aspirant");
            if (p.t_aspirant < p.k_sel + 1)
                throw std::invalid_argument("T_aspirant scale too small for the selection game counter");
            p.t_m_schedule.clear();
            for (std::int64_t m = 0; m <= p.m_levels; ++m)
                p.t_m_schedule.push_back(6 * p.t_aspirant + 7 * p.k_round * m);
            p.candidate_expiry = ceil_snap(2.0 * static_cast<double>(p.t_m_schedule.back()) * p.scales.expiry);
            check_pos(p.candidate_expiry, "candidate_expiry");
            p.universe_size =
                static_cast<std::uint64_t>(p.t_aspirant) * 5 * 3 * 27 * 2 * 2 +                     // aspirant
                static_cast<std::uint64_t>(p.m_levels + 1) * p.expert_counter_max * 4 * 2 * 2 +     // expert
                static_cast<std::uint64_t>(p.pull_interval) * 4 * 2 * 2 * 2 +                       // regular
                static_cast<std::uint64_t>(p.m_levels) * p.candidate_expiry * 4 * 27 * 2 * 2 +      // candidate
                4 + 4;                                                                              // terminal, informed
            break;
        }
        case ProtocolId::Baseline3State: {
            p.universe_size = 3;
            break;
        }
    }
    return p;
}

inline ParamSet derive_params_preset(ProtocolId id, std::uint64_t n, double epsilon,
                                     const std::string& preset, const Overrides& extra = {}) {
    Overrides ov = preset_overrides(id, preset);
    for (const auto& [k, v] : extra) ov[k] = v;
    return derive_params(id, n, epsilon, ov, preset);
}

}  // namespace mcsim
