#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mcsim/analyzer.hpp"
#include "mcsim/sweep.hpp"

namespace mcsim {

inline constexpr const char* kToolVersion = "0.1.0";

// Experiment configs round-trip losslessly through this JSON shape; the
// schema is documented in the README.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["protocol"] = to_string(cfg.protocol);
    j["n"] = cfg.n_list;
    j["p"] = cfg.p_list;
    j["epsilon"] = cfg.epsilon;
    j["seed_base"] = cfg.seed_base;
    j["repetitions"] = cfg.repetitions;
    j["preset"] = cfg.preset;
    j["overrides"] = cfg.overrides;
    j["horizon_factor"] = cfg.horizon_factor;
    j["audits"] = cfg.audits;
    j["majority_bit"] = cfg.majority_bit;
    j["jobs"] = cfg.jobs;
    j["out_csv"] = cfg.out_csv;
    j["out_meta"] = cfg.out_meta;
    return j;
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.protocol = protocol_id_from_string(j.at("protocol").get<std::string>());
    cfg.n_list = j.at("n").get<std::vector<std::uint64_t>>();
    cfg.p_list = j.at("p").get<std::vector<double>>();
    cfg.epsilon = j.at("epsilon").get<double>();
    if (j.contains("seed_base")) cfg.seed_base = j["seed_base"].get<std::uint64_t>();
    if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<std::uint64_t>();
    if (j.contains("preset")) cfg.preset = j["preset"].get<std::string>();
    if (j.contains("overrides")) cfg.overrides = j["overrides"].get<Overrides>();
    if (j.contains("horizon_factor")) cfg.horizon_factor = j["horizon_factor"].get<double>();
    if (j.contains("audits")) cfg.audits = j["audits"].get<bool>();
    if (j.contains("majority_bit")) cfg.majority_bit = j["majority_bit"].get<int>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<unsigned>();
    if (j.contains("out_csv")) cfg.out_csv = j["out_csv"].get<std::string>();
    if (j.contains("out_meta")) cfg.out_meta = j["out_meta"].get<std::string>();
    cfg.validate();
    return cfg;
}

// Sidecar emitted next to every CSV: config echo plus environment, so any
// figure can be reproduced from its sidecar alone.
inline nlohmann::json sweep_meta_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["tool"] = "mcsim";
    j["version"] = kToolVersion;
    j["config"] = config_to_json(cfg);
    j["csv_header"] = kCsvHeader;
    return j;
}

inline nlohmann::json state_to_json(const State& s) {
    nlohmann::json a = nlohmann::json::array();
    int last = 8;
    while (last > 0 && s.f[last] == 0) --last;
    for (int i = 0; i <= last; ++i) a.push_back(s.f[i]);
    return a;
}

// Analyzer report: per-state classification flags plus the A-sequence sizes.
inline nlohmann::json report_to_json(const StateSetReport& rep, const std::string& protocol_name,
                                     std::uint64_t universe_size) {
    nlohmann::json j;
    j["tool"] = "mcsim";
    j["version"] = kToolVersion;
    j["protocol"] = protocol_name;
    j["mode"] = rep.mode == AnalyzerMode::Async ? "async" : "sync";
    j["universe_size"] = universe_size;
    j["a_sizes"] = rep.a_sizes;
    j["fixed_point_index"] = rep.fixed_point_index;
    j["period_start"] = rep.period_start;
    j["period_length"] = rep.period_length;
    j["reachable_count"] = rep.reachable.size();

    std::unordered_set<State, StateHash> term(rep.terminal_states.begin(), rep.terminal_states.end());
    std::unordered_set<State, StateHash> pass(rep.passive_states.begin(), rep.passive_states.end());
    std::unordered_set<State, StateHash> aware(rep.aware_states.begin(), rep.aware_states.end());
    nlohmann::json states = nlohmann::json::array();
    for (const State& s : rep.reachable) {
        nlohmann::json e;
        e["state"] = state_to_json(s);
        e["terminal"] = term.count(s) > 0;
        e["passive"] = pass.count(s) > 0;
        e["aware"] = aware.count(s) > 0;
        states.push_back(std::move(e));
    }
    j["states"] = std::move(states);
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace mcsim
