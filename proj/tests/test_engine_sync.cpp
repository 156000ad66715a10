#include <doctest.h>

#include <cmath>
#include <map>

#include "mcsim/engine_sync.hpp"
#include "mcsim/protocols/baseline.hpp"
#include "support/toys.hpp"

using namespace mcsim;
using namespace mcsim::testing;

namespace {
Instance tiny_instance(std::vector<std::uint8_t> bits) {
    Instance inst;
    inst.n = bits.size();
    inst.initial_bits = std::move(bits);
    std::size_t zeros = std::count(inst.initial_bits.begin(), inst.initial_bits.end(), std::uint8_t{0});
    inst.majority_bit = 2 * zeros >= inst.n ? 0 : 1;
    inst.advantage_fraction =
        static_cast<double>(inst.majority_bit ? inst.n - zeros : zeros) / static_cast<double>(inst.n);
    return inst;
}
}  // namespace

TEST_CASE("two mutual initiators reject each other, both initiations cost") {
    BaselineProtocol p;
    std::vector<State> pre{make_state(7, 0), make_state(7, 0)};
    Rng rng(1);
    auto rr = resolve_round(p, pre, rng);
    CHECK(rr.initiators.size() == 2);
    CHECK(rr.established.empty());
    CHECK(rr.rejected.size() == 2);
    CHECK(rr.target_of[0] == 1);
    CHECK(rr.target_of[1] == 0);
}

TEST_CASE("contested recipients pick exactly one suitor, uniformly") {
    // nodes 0 and 1 initiate; node 2 never does
    TableProtocol t;
    State active = make_state(1, 0), quiet = make_state(2, 0);
    t.states = {active, quiet};
    t.init0 = active;
    t.init1 = quiet;
    t.initiator[active] = true;
    std::vector<State> pre{active, active, quiet};
    Rng rng(77);
    int contested = 0, wins0 = 0;
    for (int it = 0; it < 10000; ++it) {
        auto rr = resolve_round(t, pre, rng);
        REQUIRE(rr.initiators.size() == 2);
        // role partition: every initiator is established or rejected, never both
        std::vector<int> role(3, 0);
        for (auto [i, j] : rr.established) {
            role[i] += 1;
            role[j] += 1;
            CHECK_FALSE(t.is_initiator(pre[j]));
        }
        for (auto i : rr.rejected) role[i] += 1;
        for (auto i : rr.initiators) CHECK(role[i] == 1);
        if (rr.target_of[0] == 2 && rr.target_of[1] == 2) {
            ++contested;
            REQUIRE(rr.established.size() == 1);
            CHECK(rr.established[0].second == 2);
            CHECK(rr.rejected.size() == 1);
            wins0 += rr.established[0].first == 0;
        }
    }
    // both initiators target the quiet node in about a quarter of the rounds
    CHECK(contested > 2200);
    CHECK(contested < 2800);
    // the winner is uniform between the two suitors: 3 sigma band
    const double mean = contested / 2.0, sd = std::sqrt(contested * 0.25);
    CHECK(std::abs(wins0 - mean) < 3.0 * sd);
}

TEST_CASE("a round without initiators is all idle and costs nothing") {
    auto t = toy_blinker();  // nobody ever initiates
    std::vector<State> pre{make_state(3, 0), make_state(3, 1), make_state(3, 2), make_state(3, 0)};
    Rng rng(5);
    auto rr = resolve_round(t, pre, rng);
    CHECK(rr.initiators.empty());
    CHECK(rr.established.empty());
    CHECK(rr.rejected.empty());
    auto inst = tiny_instance(std::vector<std::uint8_t>(16, 0));
    SyncSimConfig cfg;
    cfg.max_rounds = 3;
    auto res = run_sync(t, inst, cfg);
    CHECK(res.communications_total == 0);
}

TEST_CASE("each node changes state at most once per round") {
    BaselineProtocol p;
    auto inst = tiny_instance({0, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0});
    SyncSimConfig cfg;
    cfg.seed = 31;
    cfg.max_rounds = 60;
    std::map<std::pair<double, std::uint64_t>, int> changes;
    cfg.observer = [&](double t, std::uint64_t node, const State&, const State&) {
        ++changes[{t, node}];
    };
    run_sync(p, inst, cfg);
    for (auto& [key, count] : changes) CHECK(count == 1);
}

TEST_CASE("round cost equals the number of initiators") {
    BaselineProtocol p;
    auto inst = tiny_instance(std::vector<std::uint8_t>(16, 0));
    SyncSimConfig cfg;
    cfg.seed = 4;
    cfg.max_rounds = 1;
    auto res = run_sync(p, inst, cfg);
    CHECK(res.communications_total == 16);
    cfg.max_rounds = 5;
    res = run_sync(p, inst, cfg);
    CHECK(res.communications_total == 80);
}

TEST_CASE("all-terminal initial states end immediately") {
    auto t = toy_frozen();
    auto res = run_sync(t, tiny_instance(std::vector<std::uint8_t>(16, 0)), {});
    CHECK(res.communications_total == 0);
    CHECK(res.terminal_time == 0.0);
    CHECK_FALSE(res.terminal_censored);
}

TEST_CASE("the round outcome ignores node processing order") {
    // replay a round with the commit loop running in reverse order
    BaselineProtocol p;
    auto inst = tiny_instance({0, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0});
    const std::uint64_t n = inst.n;
    std::vector<State> pre(n);
    for (std::uint64_t i = 0; i < n; ++i) pre[i] = p.initial_state(inst.initial_bits[i]);

    Rng rng_a(9), rng_b(9);
    auto ra = resolve_round(p, pre, rng_a);
    auto rb = resolve_round(p, pre, rng_b);

    std::vector<State> post_fwd = pre, post_rev = pre;
    for (auto [i, j] : ra.established) {
        auto [x, y] = p.on_initiate(pre[i], pre[j]);
        post_fwd[i] = x;
        post_fwd[j] = y;
    }
    for (auto it = rb.established.rbegin(); it != rb.established.rend(); ++it) {
        auto [x, y] = p.on_initiate(pre[it->first], pre[it->second]);
        post_rev[it->first] = x;
        post_rev[it->second] = y;
    }
    for (std::uint32_t i : ra.rejected) post_fwd[i] = p.on_rejected(pre[i]);
    for (auto it = rb.rejected.rbegin(); it != rb.rejected.rend(); ++it)
        post_rev[*it] = p.on_rejected(pre[*it]);
    CHECK(post_fwd == post_rev);
}

TEST_CASE("rejection updates reach states the pair updates cannot") {
    auto t = toy_reject_freeze();
    auto inst = tiny_instance(std::vector<std::uint8_t>(16, 0));
    SyncSimConfig cfg;
    cfg.seed = 21;
    cfg.max_rounds = 500;
    auto res = run_sync(t, inst, cfg);
    CHECK(res.all_terminal);  // every node was eventually rejected once
    CHECK(res.success());
}

TEST_CASE("determinism per seed") {
    BaselineProtocol p;
    auto inst = tiny_instance({0, 1, 0, 0, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 0});
    SyncSimConfig cfg;
    cfg.seed = 1234;
    cfg.max_rounds = 50;
    auto a = run_sync(p, inst, cfg);
    auto b = run_sync(p, inst, cfg);
    CHECK(a.communications_total == b.communications_total);
    CHECK(a.final_incorrect_count == b.final_incorrect_count);
    CHECK(a.states_observed == b.states_observed);
}
