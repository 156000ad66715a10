#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mcsim/state.hpp"

namespace mcsim {

// The protocol-as-data contract shared by both engines and the analyzer.
//
//   initial_state(b)      state of a node whose initial bit is b
//   is_initiator(s)       membership in S': the node initiates at its ring
//   on_initiate(s, t)     pairwise update (Lambda1, Lambda2), total on S' x S
//   on_idle(s)            self-update at a ring without communication
//   on_rejected(s)        update of a rejected initiator (synchronous model;
//                         identity unless the protocol says otherwise)
//   belief_of(s)          the node's current estimate of the majority bit
//   is_terminal(s)        fast predicate for the terminal-state family; must
//                         agree with the model definition (checked by the
//                         analyzer's classify_terminal in tests)
//   contains(s)           membership in the declared state universe
//   universe_size()       number of encodable states
//   enumerate_universe()  all encodable states (analyzer-side callers guard
//                         the size first)
//   audit_label(s)        small label for entry tallies (0 = unlabeled)
template <typename P>
concept Protocol = requires(const P p, const State s, const State t, int b) {
    { p.name() } -> std::convertible_to<std::string_view>;
    { p.initial_state(b) } -> std::same_as<State>;
    { p.is_initiator(s) } -> std::same_as<bool>;
    { p.on_initiate(s, t) } -> std::same_as<StatePair>;
    { p.on_idle(s) } -> std::same_as<State>;
    { p.on_rejected(s) } -> std::same_as<State>;
    { p.belief_of(s) } -> std::same_as<int>;
    { p.is_terminal(s) } -> std::same_as<bool>;
    { p.contains(s) } -> std::same_as<bool>;
    { p.universe_size() } -> std::convertible_to<std::uint64_t>;
    { p.enumerate_universe() } -> std::same_as<std::vector<State>>;
    { p.audit_label(s) } -> std::same_as<unsigned>;
};

struct ProtocolBugError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A toy protocol given fully as data: explicit state list and transition
// tables. Missing table entries fall back to the identity, so small test
// machines can be written tersely.
struct TableProtocol {
    std::string id = "table";
    std::vector<State> states;
    State init0{}, init1{};
    std::map<State, bool> initiator;
    std::map<std::pair<State, State>, StatePair> pair_update;
    std::map<State, State> idle_update;
    std::map<State, State> rejected_update;
    std::map<State, int> belief;

    std::string_view name() const { return id; }
    State initial_state(int b) const { return b ? init1 : init0; }
    bool is_initiator(const State& s) const {
        auto it = initiator.find(s);
        return it != initiator.end() && it->second;
    }
    StatePair on_initiate(const State& a, const State& b) const {
        auto it = pair_update.find({a, b});
        return it != pair_update.end() ? it->second : StatePair{a, b};
    }
    State on_idle(const State& s) const {
        auto it = idle_update.find(s);
        return it != idle_update.end() ? it->second : s;
    }
    State on_rejected(const State& s) const {
        auto it = rejected_update.find(s);
        return it != rejected_update.end() ? it->second : s;
    }
    int belief_of(const State& s) const {
        auto it = belief.find(s);
        return it != belief.end() ? it->second : 0;
    }
    bool is_terminal(const State& s) const {
        // Exact model definition; table protocols are small enough to scan.
        if (is_initiator(s)) return false;
        if (on_idle(s) != s) return false;
        for (const auto& t : states)
            if (is_initiator(t) && on_initiate(t, s).second != s) return false;
        return true;
    }
    bool contains(const State& s) const {
        for (const auto& t : states)
            if (t == s) return true;
        return false;
    }
    std::uint64_t universe_size() const { return states.size(); }
    std::vector<State> enumerate_universe() const { return states; }
    unsigned audit_label(const State&) const { return 0; }
};

static_assert(Protocol<TableProtocol>);

}  // namespace mcsim
