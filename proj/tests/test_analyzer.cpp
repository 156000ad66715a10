#include <doctest.h>

#include <algorithm>

#include "mcsim/analyzer.hpp"
#include "mcsim/engine_async.hpp"
#include "mcsim/engine_sync.hpp"
#include "mcsim/protocols/baseline.hpp"
#include "mcsim/protocols/full_async.hpp"
#include "mcsim/protocols/simple_async.hpp"
#include "mcsim/protocols/sync.hpp"
#include "support/reachability_oracle.hpp"
#include "support/toys.hpp"

using namespace mcsim;
using namespace mcsim::testing;

namespace {

template <Protocol P>
void check_against_oracle(const P& proto) {
    AnalyzerLimits lim;
    lim.keep_sets = true;

    auto rep = compute_reachable(proto, AnalyzerMode::Async, lim);
    auto ora = oracle_async(proto);
    REQUIRE(rep.a_sequence.size() == ora.sequence.size());
    for (std::size_t k = 0; k < ora.sequence.size(); ++k) CHECK(rep.a_sequence[k] == ora.sequence[k]);
    CHECK(rep.fixed_point_index == ora.fixed_point_index);
    CHECK(static_cast<std::uint64_t>(rep.fixed_point_index) <= proto.universe_size());
    for (std::size_t k = 1; k < rep.a_sizes.size(); ++k) CHECK(rep.a_sizes[k] >= rep.a_sizes[k - 1]);

    auto reps = compute_reachable(proto, AnalyzerMode::Sync, lim);
    auto oras = oracle_sync(proto);
    REQUIRE(reps.a_sequence.size() == oras.sequence.size());
    for (std::size_t k = 0; k < oras.sequence.size(); ++k) CHECK(reps.a_sequence[k] == oras.sequence[k]);
    CHECK(reps.period_start == oras.period_start);
    CHECK(reps.period_length == oras.period_length);
}

}  // namespace

TEST_CASE("reachable sets match the brute-force oracle on toy protocols") {
    check_against_oracle(toy_frozen());
    check_against_oracle(toy_copy_freeze());
    check_against_oracle(toy_flip_on_contact());
    check_against_oracle(toy_counter_cycle());
    check_against_oracle(toy_blinker());
    check_against_oracle(toy_reject_freeze());
    check_against_oracle(BaselineProtocol());
}

TEST_CASE("frozen toy: the two initial states are already the fixed point") {
    auto rep = compute_reachable(toy_frozen(), AnalyzerMode::Async);
    CHECK(rep.fixed_point_index == 0);
    CHECK(rep.reachable.size() == 2);
}

TEST_CASE("blinker toy: sync sequences are periodic, not monotone") {
    auto rep = compute_reachable(toy_blinker(), AnalyzerMode::Sync);
    CHECK(rep.period_start == 0);
    CHECK(rep.period_length == 2);
    CHECK(rep.fixed_point_index == -1);
    CHECK(rep.reachable.size() == 3);
}

TEST_CASE("sync reachability includes rejection images") {
    auto rep = compute_reachable(toy_reject_freeze(), AnalyzerMode::Sync);
    CHECK(std::binary_search(rep.reachable.begin(), rep.reachable.end(), make_state(4, 0)));
    CHECK(std::binary_search(rep.reachable.begin(), rep.reachable.end(), make_state(4, 1)));
}

TEST_CASE("terminal classification on toys") {
    auto t = toy_copy_freeze();
    auto terms = classify_terminal(t);
    CHECK(terms == std::vector<State>{make_state(4, 0), make_state(4, 1)});
    CHECK(classify_terminal(toy_flip_on_contact()).empty());
    CHECK(classify_terminal(BaselineProtocol()).empty());  // every state initiates
}

TEST_CASE("an unstable idle update disqualifies a contact-fixed state") {
    // blinker states a and b are never touched by contacts, but their idle
    // updates move, so only the self-fixed state is terminal
    auto terms = classify_terminal(toy_blinker());
    CHECK(terms == std::vector<State>{make_state(3, 2)});
}

TEST_CASE("passive classification walks the idle orbit") {
    auto t = toy_counter_cycle();
    auto passive = classify_passive(t);
    // the five cycle states all reach the initiating counter value; only the
    // frozen pair is passive
    CHECK(passive == std::vector<State>{make_state(4, 0), make_state(4, 1)});
    // terminal implies passive
    for (const State& s : classify_terminal(t))
        CHECK(std::binary_search(passive.begin(), passive.end(), s));
}

TEST_CASE("aware classification on toys") {
    CHECK(classify_aware(toy_flip_on_contact(),
                         compute_reachable(toy_flip_on_contact(), AnalyzerMode::Async).reachable)
              .empty());
    auto t = toy_copy_freeze();
    auto rep = compute_reachable(t, AnalyzerMode::Async);
    auto aware = classify_aware(t, rep.reachable);
    CHECK(aware == std::vector<State>{make_state(4, 0), make_state(4, 1)});
}

TEST_CASE("simple-async analysis at n = 1024 (reduced C0)") {
    static const auto params = derive_params(ProtocolId::SimpleAsync, 1024, 0.2, {{"c0_scale", 0.01}});
    static const SimpleAsyncProtocol p(params);
    static const auto rep = analyze(p, AnalyzerMode::Async);

    SUBCASE("terminal states are exactly the terminal family") {
        CHECK(rep.terminal_states == std::vector<State>{make_state(4, 0), make_state(4, 1)});
    }
    SUBCASE("pushing experts are aware, aspirants are not") {
        bool some_pushing = false;
        for (const State& s : rep.reachable) {
            if (s.tag() == 2 && s[1] == 2) {
                some_pushing = true;
                CHECK(std::binary_search(rep.aware_states.begin(), rep.aware_states.end(), s));
            }
        }
        CHECK(some_pushing);
        for (const State& s : rep.aware_states) CHECK(s.tag() != 1);
    }
    SUBCASE("regular states are not passive; terminal states are") {
        for (const State& s : rep.passive_states) CHECK(s.tag() != 3);
        for (const State& s : rep.terminal_states) {
            CHECK(std::binary_search(rep.passive_states.begin(), rep.passive_states.end(), s));
            CHECK(std::binary_search(rep.aware_states.begin(), rep.aware_states.end(), s));
        }
    }
    SUBCASE("the fixed point arrives within the universe size") {
        CHECK(static_cast<std::uint64_t>(rep.fixed_point_index) <= params.universe_size);
    }
}

TEST_CASE("full-async terminal classification on a tiny instantiation") {
    auto params = derive_params(ProtocolId::FullAsync, 16, 0.2,
                                {{"t_aspirant_scale", 0.0006}, {"k_scale", 0.1},
                                 {"k_sel_scale", 0.1}, {"m_scale", 0.5}, {"expiry_scale", 0.05}});
    FullAsyncProtocol p(params);
    auto terms = classify_terminal(p);
    std::vector<State> expected;
    for (int fb = 0; fb <= 1; ++fb)
        for (int b = 0; b <= 1; ++b) expected.push_back(make_state(4, fb, b));
    std::sort(expected.begin(), expected.end());
    CHECK(terms == expected);
}

TEST_CASE("sync protocol reachability in sync mode covers its executions") {
    auto params = derive_params(ProtocolId::Sync, 16, 0.2,
                                {{"k_scale", 0.1}, {"k_sel_scale", 0.05},
                                 {"sel_scale", 0.002}, {"pull_scale", 1.0}});
    SyncProtocol p(params);
    auto rep = compute_reachable(p, AnalyzerMode::Sync);
    CHECK(rep.period_length >= 1);
    // terminal states arise only through rejected pushes, and are reached
    CHECK(std::binary_search(rep.reachable.begin(), rep.reachable.end(), make_state(4, 0)));
    CHECK(std::binary_search(rep.reachable.begin(), rep.reachable.end(), make_state(4, 1)));
    for (std::uint64_t seed = 9; seed < 12; ++seed) {
        auto inst = make_instance(16, 0.75, seed);
        SyncSimConfig cfg;
        cfg.seed = seed + 1;
        cfg.max_rounds = 500;
        auto res = run_sync(p, inst, cfg);
        for (const State& s : res.states_observed)
            CHECK(std::binary_search(rep.reachable.begin(), rep.reachable.end(), s));
    }
}

TEST_CASE("universe size guard") {
    auto params = derive_params(ProtocolId::SimpleAsync, 1024, 0.2);  // ~25M states
    SimpleAsyncProtocol p(params);
    CHECK_THROWS_AS(compute_reachable(p, AnalyzerMode::Async), std::invalid_argument);
}

TEST_CASE("every state of A(s) shows up in a large simulation") {
    BaselineProtocol p;
    auto rep = compute_reachable(p, AnalyzerMode::Async);
    CHECK(rep.reachable.size() == 3);
    auto inst = make_instance(100000, 0.7, 404);
    AsyncSimConfig cfg;
    cfg.seed = 405;
    cfg.horizon = 3.0;  // k = s = 3 steps of the recurrence
    cfg.snapshot_times = {3.0};
    cfg.collect_states = false;
    auto res = run_async(p, inst, cfg);
    REQUIRE(res.snapshots.size() == 1);
    CHECK(res.snapshots[0].counts.size() == 3);  // all of A(s), each with count >= 1
    std::uint64_t total = 0;
    for (const auto& sc : res.snapshots[0].counts) total += sc.count;
    CHECK(total == inst.n);
}
