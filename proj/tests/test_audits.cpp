#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "mcsim/engine_async.hpp"
#include "mcsim/protocols/full_async.hpp"
#include "mcsim/protocols/registry.hpp"
#include "mcsim/protocols/simple_async.hpp"

using namespace mcsim;

TEST_CASE("frequency histogram lookup") {
    SimpleAsyncProtocol p(derive_params_preset(ProtocolId::SimpleAsync, 256, 0.2, "desk"));
    auto inst = make_instance(256, 0.7, 3);
    AsyncSimConfig cfg;
    cfg.seed = 4;
    cfg.horizon = 100.0;
    cfg.snapshot_times = {0.0, 10.0};
    auto res = run_async(p, inst, cfg);
    const auto& at0 = frequency_histogram(res, 0.0);
    std::uint64_t total = 0;
    for (const auto& sc : at0.counts) total += sc.count;
    CHECK(total == 256);
    CHECK_THROWS_AS(frequency_histogram(res, 3.5), std::invalid_argument);
}

TEST_CASE("simple-async: terminal beliefs trace to pushing experts or terminals") {
    auto params = derive_params_preset(ProtocolId::SimpleAsync, 512, 0.2, "desk");
    SimpleAsyncProtocol p(params);
    auto inst = make_instance(512, 0.7, 21);
    AsyncSimConfig cfg;
    cfg.seed = 22;
    cfg.horizon = default_horizon(params);

    struct Ev {
        double t;
        State old, neu;
    };
    std::vector<Ev> events;
    cfg.observer = [&](double t, std::uint64_t, const State& o, const State& n) {
        events.push_back({t, o, n});
    };
    auto res = run_async(p, inst, cfg);
    REQUIRE(res.all_terminal);
    CHECK(res.communications_at_consensus <= res.communications_at_terminal);
    CHECK(res.communications_at_terminal <= res.communications_total);

    std::set<int> terminal_beliefs;
    bool lineage_ok = true, xi_monotone = true;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.old.tag() == 2 && e.neu.tag() == 2) xi_monotone = xi_monotone && e.neu[1] >= e.old[1];
        if (e.neu.tag() == 4 && e.old.tag() != 4) {
            const int b = e.neu[1];
            bool ok = false;
            if (e.old.tag() == 2) {
                ok = e.old[4] == b;  // a pushing expert retires with its own belief
            } else {
                // pushed by an expert (a co-event at the same instant) or
                // adopted from an existing terminal node
                if (terminal_beliefs.count(b)) ok = true;
                for (std::size_t j = i >= 2 ? i - 2 : 0; !ok && j < std::min(events.size(), i + 3); ++j) {
                    if (j == i) continue;
                    if (events[j].t == e.t && events[j].old.tag() == 2 && events[j].old[1] == 2 &&
                        events[j].old[4] == b)
                        ok = true;
                }
            }
            lineage_ok = lineage_ok && ok;
            terminal_beliefs.insert(b);
        }
    }
    CHECK(lineage_ok);
    CHECK(xi_monotone);
}

TEST_CASE("full-async: a node is an expert at most once, types are uniform") {
    auto params = derive_params_preset(ProtocolId::FullAsync, 4096, 0.2, "desk");
    FullAsyncProtocol p(params);
    std::array<std::uint64_t, 5> type_counts{};
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto inst = make_instance(4096, 0.75, seed);
        AsyncSimConfig cfg;
        cfg.seed = seed + 100;
        cfg.horizon = default_horizon(params);
        cfg.collect_states = false;
        std::vector<int> expert_entries(4096, 0);
        cfg.observer = [&](double, std::uint64_t node, const State& o, const State& n) {
            if (n.tag() == 2 && o.tag() != 2) ++expert_entries[node];
        };
        auto res = run_async(p, inst, cfg);
        for (int c : expert_entries) CHECK(c <= 1);
        for (int xi = 1; xi <= 4; ++xi) type_counts[xi] += res.audit_entries[xi];
    }
    // chi-squared against the uniform law on [4], 3 degrees of freedom
    double total = 0;
    for (int xi = 1; xi <= 4; ++xi) total += static_cast<double>(type_counts[xi]);
    REQUIRE(total > 1000);
    const double expect = total / 4.0;
    double chi2 = 0;
    for (int xi = 1; xi <= 4; ++xi) {
        const double d = static_cast<double>(type_counts[xi]) - expect;
        chi2 += d * d / expect;
    }
    CHECK(chi2 < 16.27);  // p = 0.001 tail
}

TEST_CASE("full-async: informed and terminal beliefs trace to level-M experts") {
    auto params = derive_params_preset(ProtocolId::FullAsync, 2048, 0.2, "desk");
    FullAsyncProtocol p(params);
    const auto M = params.m_levels;
    for (std::uint64_t seed = 3; seed <= 5; ++seed) {
        auto inst = make_instance(2048, 0.75, seed);
        AsyncSimConfig cfg;
        cfg.seed = seed;
        cfg.horizon = default_horizon(params);
        cfg.collect_states = false;
        struct Ev {
            double t;
            State old, neu;
        };
        std::vector<Ev> events;
        cfg.observer = [&](double t, std::uint64_t, const State& o, const State& n) {
            events.push_back({t, o, n});
        };
        run_async(p, inst, cfg);
        std::set<int> spread_beliefs;  // beliefs held by informed/terminal nodes so far
        bool ok = true;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const auto& e = events[i];
            const bool became_spread =
                (e.neu.tag() == 6 && e.old.tag() != 6) || (e.neu.tag() == 4 && e.old.tag() != 4);
            if (!became_spread) continue;
            const int b = p.belief_of(e.neu);
            bool traced = spread_beliefs.count(b) > 0;
            if (!traced && e.old.tag() == 2 && e.old[1] == M) traced = true;  // the expert itself
            // converted by a level-M expert finishing at the same instant
            for (std::size_t j = i >= 2 ? i - 2 : 0; !traced && j < std::min(events.size(), i + 3);
                 ++j) {
                if (j == i) continue;
                if (events[j].t == e.t && events[j].old.tag() == 2 && events[j].old[1] == M &&
                    p.belief_of(events[j].old) == b)
                    traced = true;
            }
            ok = ok && traced;
            spread_beliefs.insert(b);
        }
        CHECK(ok);
    }
}
