#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mcsim/protocol.hpp"
#include "mcsim/state.hpp"

namespace mcsim {

// The classical three-state approximate-majority automaton, used as a
// constant-memory baseline for cost-growth probes. States are 0, 1 and
// blank; every state initiates. A blank initiator adopts the partner's
// value; a valued initiator converts a blank partner and erases an opposing
// one. There are no terminal states, so runs end at the horizon and
// consensus is detected retrospectively.
class BaselineProtocol {
public:
    static constexpr std::int32_t kBlank = 2;

    std::string_view name() const { return "baseline-3state"; }

    State initial_state(int b) const { return make_state(7, b); }

    bool is_initiator(const State&) const { return true; }

    StatePair on_initiate(const State& s, const State& partner) const {
        const auto a = s[1], b = partner[1];
        if (a == kBlank && b != kBlank) return {make_state(7, b), partner};
        if (a != kBlank && b == kBlank) return {s, make_state(7, a)};
        if (a != kBlank && b != kBlank && a != b) return {s, make_state(7, kBlank)};
        return {s, partner};
    }

    State on_idle(const State& s) const { return s; }
    State on_rejected(const State& s) const { return s; }

    int belief_of(const State& s) const { return s[1] == 1 ? 1 : 0; }

    bool is_terminal(const State&) const { return false; }

    bool contains(const State& s) const { return s.tag() == 7 && s[1] >= 0 && s[1] <= 2; }

    std::uint64_t universe_size() const { return 3; }

    std::vector<State> enumerate_universe() const {
        return {make_state(7, 0), make_state(7, 1), make_state(7, kBlank)};
    }

    unsigned audit_label(const State&) const { return 0; }
};

static_assert(Protocol<BaselineProtocol>);

}  // namespace mcsim
