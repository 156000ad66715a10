// mcsim: simulator and state-space analyzer for memory-constrained
// majority-consensus protocols on the complete graph.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcsim/analyzer.hpp"
#include "mcsim/json_io.hpp"
#include "mcsim/sweep.hpp"

namespace {

mcsim::Overrides parse_overrides(const std::vector<std::string>& kvs) {
    mcsim::Overrides ov;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--override expects key=value: " + kv);
        ov[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return ov;
}

void print_run_summary(const mcsim::SweepRow& row) {
    const auto& r = row.r;
    std::printf("protocol            %s (%s model, preset %s)\n", row.protocol.c_str(),
                row.model.c_str(), row.preset.c_str());
    std::printf("n / p / epsilon     %llu / %.4f (realized %.4f) / %.3f\n",
                static_cast<unsigned long long>(row.n), row.p_target, row.p_realized, row.epsilon);
    std::printf("seed                %llu\n", static_cast<unsigned long long>(row.seed));
    if (row.error) {
        std::printf("result              run failed (see --help for valid ranges)\n");
        return;
    }
    std::printf("success             %s\n", r.success() ? "yes" : "no");
    std::printf("communications      %llu total, %llu at consensus, %llu at terminal\n",
                static_cast<unsigned long long>(r.communications_total),
                static_cast<unsigned long long>(r.communications_at_consensus),
                static_cast<unsigned long long>(r.communications_at_terminal));
    if (r.consensus_censored) std::printf("consensus time      censored\n");
    else std::printf("consensus time      %.3f\n", r.consensus_time);
    if (r.terminal_censored) std::printf("terminal time       censored\n");
    else std::printf("terminal time       %.3f\n", r.terminal_time);
    std::printf("final incorrect     %llu\n", static_cast<unsigned long long>(r.final_incorrect_count));
    std::printf("states used         %llu\n", static_cast<unsigned long long>(row.states_used));
    std::printf("events processed    %llu\n", static_cast<unsigned long long>(r.events_processed));
    std::printf("experts (lvl0/all)  %llu / %llu\n",
                static_cast<unsigned long long>(row.experts_level0),
                static_cast<unsigned long long>(row.experts_total));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and analyzer for memory-constrained majority consensus"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", "run a single simulation and print a summary");
    std::string r_protocol = "simple-async", r_preset = "desk", r_out;
    std::uint64_t r_n = 4096, r_seed = 1;
    double r_p = 0.7, r_eps = 0.2, r_horizon_factor = 1.0;
    int r_majority = 0;
    bool r_no_audit = false;
    std::vector<std::string> r_ov;
    run->add_option("--protocol", r_protocol, "simple-async | sync | full-async | baseline-3state");
    run->add_option("--n", r_n, "number of nodes (>= 16)");
    run->add_option("--p", r_p, "majority fraction in [1/2, 1]");
    run->add_option("--epsilon", r_eps, "advantage parameter in (0, 1/4)");
    run->add_option("--seed", r_seed, "run seed");
    run->add_option("--preset", r_preset, "paper | desk");
    run->add_option("--override", r_ov, "scale override key=value (repeatable)");
    run->add_option("--majority-bit", r_majority, "majority bit (default 0)");
    run->add_option("--horizon-factor", r_horizon_factor, "multiplies the default horizon");
    run->add_flag("--no-audit", r_no_audit, "skip observed-state collection");
    run->add_option("--out", r_out, "also write a one-row CSV");

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "run a (protocol, n, p, seed) grid to CSV");
    std::string s_config, s_protocol = "simple-async", s_preset = "desk", s_out = "runs.csv", s_meta;
    std::vector<std::uint64_t> s_n;
    std::vector<double> s_p;
    double s_eps = 0.2, s_horizon_factor = 1.0;
    std::uint64_t s_seeds = 1, s_seed_base = 1;
    int s_majority = 0;
    unsigned s_jobs = 0;
    bool s_no_audit = false;
    std::vector<std::string> s_ov;
    sweep->add_option("--config", s_config, "JSON config file (flags override nothing when set)");
    sweep->add_option("--protocol", s_protocol, "protocol id");
    sweep->add_option("--n", s_n, "node counts (repeat or comma-separate)")->delimiter(',');
    sweep->add_option("--p", s_p, "majority fractions")->delimiter(',');
    sweep->add_option("--epsilon", s_eps, "advantage parameter");
    sweep->add_option("--seeds", s_seeds, "repetitions per cell");
    sweep->add_option("--seed-base", s_seed_base, "base seed for the grid");
    sweep->add_option("--preset", s_preset, "paper | desk");
    sweep->add_option("--override", s_ov, "scale override key=value (repeatable)");
    sweep->add_option("--majority-bit", s_majority, "majority bit (default 0)");
    sweep->add_option("--horizon-factor", s_horizon_factor, "multiplies the default horizon");
    sweep->add_option("--jobs", s_jobs, "worker threads (default: hardware)");
    sweep->add_flag("--no-audit", s_no_audit, "skip observed-state collection");
    sweep->add_option("--out", s_out, "output CSV path");
    sweep->add_option("--meta", s_meta, "sidecar JSON path (default: <out>.meta.json)");

    // ---- analyze ----
    auto* analyze_cmd = app.add_subcommand("analyze", "reachable states and classifications");
    std::string a_protocol = "simple-async", a_preset = "desk", a_mode = "auto", a_out;
    std::uint64_t a_n = 1024, a_max_universe = 200000;
    double a_eps = 0.2;
    std::vector<std::string> a_ov;
    analyze_cmd->add_option("--protocol", a_protocol, "protocol id");
    analyze_cmd->add_option("--n", a_n, "number of nodes the constants are derived for");
    analyze_cmd->add_option("--epsilon", a_eps, "advantage parameter");
    analyze_cmd->add_option("--preset", a_preset, "paper | desk");
    analyze_cmd->add_option("--override", a_ov, "scale override key=value (repeatable)");
    analyze_cmd->add_option("--mode", a_mode, "async | sync | auto (protocol's native model)");
    analyze_cmd->add_option("--max-universe", a_max_universe, "refuse larger universes");
    analyze_cmd->add_option("--out", a_out, "write the JSON report here (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            mcsim::ExperimentConfig cfg;
            cfg.protocol = mcsim::protocol_id_from_string(r_protocol);
            cfg.n_list = {r_n};
            cfg.p_list = {r_p};
            cfg.epsilon = r_eps;
            cfg.seed_base = r_seed;
            cfg.repetitions = 1;
            cfg.preset = r_preset;
            cfg.overrides = parse_overrides(r_ov);
            cfg.horizon_factor = r_horizon_factor;
            cfg.audits = !r_no_audit;
            cfg.majority_bit = r_majority;
            cfg.jobs = 1;
            auto rows = mcsim::run_sweep(cfg);
            print_run_summary(rows.at(0));
            if (!r_out.empty()) mcsim::write_file(r_out, mcsim::to_csv(rows));
            return rows.at(0).error ? 1 : 0;
        }
        if (*sweep) {
            mcsim::ExperimentConfig cfg;
            if (!s_config.empty()) {
                cfg = mcsim::config_from_json(nlohmann::json::parse(mcsim::read_file(s_config)));
            } else {
                cfg.protocol = mcsim::protocol_id_from_string(s_protocol);
                cfg.n_list = s_n.empty() ? std::vector<std::uint64_t>{1024} : s_n;
                cfg.p_list = s_p.empty() ? std::vector<double>{0.7} : s_p;
                cfg.epsilon = s_eps;
                cfg.seed_base = s_seed_base;
                cfg.repetitions = s_seeds;
                cfg.preset = s_preset;
                cfg.overrides = parse_overrides(s_ov);
                cfg.horizon_factor = s_horizon_factor;
                cfg.audits = !s_no_audit;
                cfg.majority_bit = s_majority;
                cfg.jobs = s_jobs;
                cfg.out_csv = s_out;
                cfg.out_meta = s_meta.empty() ? s_out + ".meta.json" : s_meta;
            }
            if (cfg.out_csv.empty()) cfg.out_csv = s_out;
            if (cfg.out_meta.empty()) cfg.out_meta = cfg.out_csv + ".meta.json";
            auto rows = mcsim::run_sweep(cfg);
            mcsim::write_file(cfg.out_csv, mcsim::to_csv(rows));
            mcsim::write_file(cfg.out_meta, mcsim::sweep_meta_json(cfg).dump(2) + "\n");
            std::size_t errors = 0;
            for (const auto& row : rows) errors += row.error;
            std::printf("wrote %zu rows to %s (%zu failed)\n", rows.size(), cfg.out_csv.c_str(),
                        errors);
            return 0;
        }
        if (*analyze_cmd) {
            auto id = mcsim::protocol_id_from_string(a_protocol);
            auto params = mcsim::derive_params_preset(id, a_n, a_eps, a_preset, parse_overrides(a_ov));
            auto proto = mcsim::make_protocol(params);
            mcsim::AnalyzerMode mode;
            if (a_mode == "auto") {
                mode = mcsim::uses_sync_engine(id) ? mcsim::AnalyzerMode::Sync
                                                   : mcsim::AnalyzerMode::Async;
            } else if (a_mode == "async") {
                mode = mcsim::AnalyzerMode::Async;
            } else if (a_mode == "sync") {
                mode = mcsim::AnalyzerMode::Sync;
            } else {
                throw std::invalid_argument("mode must be async, sync or auto");
            }
            mcsim::AnalyzerLimits lim;
            lim.max_universe = a_max_universe;
            auto rep = std::visit(
                [&](const auto& p) { return mcsim::analyze(p, mode, lim); }, proto);
            auto j = mcsim::report_to_json(rep, a_protocol, params.universe_size);
            if (a_out.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                mcsim::write_file(a_out, j.dump(2) + "\n");
                std::printf("wrote report to %s (%zu reachable states)\n", a_out.c_str(),
                            rep.reachable.size());
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
