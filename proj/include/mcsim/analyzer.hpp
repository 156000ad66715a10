#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mcsim/protocol.hpp"
#include "mcsim/state.hpp"

namespace mcsim {

enum class AnalyzerMode { Async, Sync };

// Reachable-state analysis of a protocol description.
//
// Async mode: A(0) = {initial states}, and
//   A(k) = A(k-1) u Lambda(A(k-1) n S', A(k-1)) u Lambda'(A(k-1) \ S');
// the sets increase and the fixed point is reached within |S| steps.
//
// Sync mode (not cumulative):
//   A(k) = Lambda1/Lambda2 images u Lambda'(A(k-1)) u on_rejected(A(k-1) n S');
// the sequence is eventually periodic; one full period is retained. The
// rejection images are not part of the written recurrence but are required
// for the containment guarantee, since synchronous executions reject
// initiators every round.
struct StateSetReport {
    AnalyzerMode mode{};
    std::vector<std::uint64_t> a_sizes;       // |A(0)|, |A(1)|, ...
    std::vector<std::vector<State>> a_sequence;  // sorted sets; kept for small universes
    bool sets_kept = false;
    std::int64_t fixed_point_index = -1;  // k* with A(k*+1) = A(k*); -1 if none
    std::int64_t period_start = -1;
    std::int64_t period_length = -1;
    std::vector<State> reachable;  // async: A(k*); sync: union over the sequence
    std::vector<State> terminal_states;
    std::vector<State> passive_states;
    std::vector<State> aware_states;
};

struct AnalyzerLimits {
    std::uint64_t max_universe = 200000;
    bool keep_sets = false;      // also kept automatically for small universes
    std::uint64_t keep_sets_threshold = 4096;
};

namespace detail {

inline std::vector<State> sorted_vec(const std::unordered_set<State, StateHash>& s) {
    std::vector<State> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace detail

// The A(k) sequence up to the fixed point (async) or through one full period
// (sync). Errors if the declared universe is too large to enumerate.
template <Protocol P>
StateSetReport compute_reachable(const P& protocol, AnalyzerMode mode,
                                 const AnalyzerLimits& limits = {}) {
    if (protocol.universe_size() > limits.max_universe)
        throw std::invalid_argument("state universe too large to analyze (" +
                                    std::to_string(protocol.universe_size()) + " states)");

    StateSetReport rep;
    rep.mode = mode;
    const bool keep = limits.keep_sets || protocol.universe_size() <= limits.keep_sets_threshold;
    rep.sets_kept = keep;

    std::unordered_set<State, StateHash> cur{protocol.initial_state(0), protocol.initial_state(1)};
    auto record = [&](const std::unordered_set<State, StateHash>& s) {
        rep.a_sizes.push_back(s.size());
        if (keep) rep.a_sequence.push_back(detail::sorted_vec(s));
    };
    record(cur);

    if (mode == AnalyzerMode::Async) {
        // worklist over pairs with at least one newly added state
        std::unordered_set<State, StateHash> all = cur;
        std::unordered_set<State, StateHash> fresh_set = cur;
        std::vector<State> fresh(cur.begin(), cur.end());
        while (!fresh.empty()) {
            std::unordered_set<State, StateHash> next;
            std::vector<State> olds(all.begin(), all.end());
            auto add = [&](const State& s) {
                if (!protocol.contains(s))
                    throw ProtocolBugError("reachable state outside the universe: " + to_string(s));
                if (!all.count(s)) next.insert(s);
            };
            for (const State& a : olds) {
                if (protocol.is_initiator(a)) {
                    for (const State& b : fresh) {
                        auto [x, y] = protocol.on_initiate(a, b);
                        add(x);
                        add(y);
                    }
                }
            }
            for (const State& a : fresh) {
                if (protocol.is_initiator(a)) {
                    for (const State& b : olds) {
                        if (fresh_set.count(b)) continue;  // covered above
                        auto [x, y] = protocol.on_initiate(a, b);
                        add(x);
                        add(y);
                    }
                } else {
                    add(protocol.on_idle(a));
                }
            }
            if (next.empty()) break;
            for (const State& s : next) all.insert(s);
            fresh.assign(next.begin(), next.end());
            fresh_set = next;
            record(all);
        }
        rep.fixed_point_index = static_cast<std::int64_t>(rep.a_sizes.size()) - 1;
        rep.period_start = rep.fixed_point_index;
        rep.period_length = 1;
        rep.reachable = detail::sorted_vec(all);
    } else {
        std::map<std::vector<State>, std::int64_t> seen;
        std::unordered_set<State, StateHash> uni = cur;
        std::vector<std::vector<State>> history{detail::sorted_vec(cur)};
        seen[history[0]] = 0;
        for (;;) {
            std::unordered_set<State, StateHash> next;
            auto add = [&](const State& s) {
                if (!protocol.contains(s))
                    throw ProtocolBugError("reachable state outside the universe: " + to_string(s));
                next.insert(s);
            };
            for (const State& a : cur) {
                if (protocol.is_initiator(a)) {
                    for (const State& b : cur) {
                        auto [x, y] = protocol.on_initiate(a, b);
                        add(x);
                        add(y);
                    }
                    add(protocol.on_rejected(a));
                }
                add(protocol.on_idle(a));
            }
            auto key = detail::sorted_vec(next);
            auto it = seen.find(key);
            if (it != seen.end()) {
                rep.period_start = it->second;
                rep.period_length = static_cast<std::int64_t>(history.size()) - it->second;
                if (rep.period_length == 1) rep.fixed_point_index = it->second;
                break;
            }
            seen[key] = static_cast<std::int64_t>(history.size());
            history.push_back(key);
            rep.a_sizes.push_back(next.size());
            if (keep) rep.a_sequence.push_back(key);
            for (const State& s : next) uni.insert(s);
            cur.swap(next);
        }
        rep.reachable = detail::sorted_vec(uni);
    }
    return rep;
}

// Terminal states per the model: not an initiator, fixed under Lambda2
// against every initiator state, and fixed under the idle update (the prose
// adds "never change state", which requires the third condition).
template <Protocol P>
std::vector<State> classify_terminal(const P& protocol) {
    const std::vector<State> uni = protocol.enumerate_universe();
    std::vector<State> initiators;
    for (const State& s : uni)
        if (protocol.is_initiator(s)) initiators.push_back(s);
    std::vector<State> out;
    for (const State& s : uni) {
        if (protocol.is_initiator(s)) continue;
        if (protocol.on_idle(s) != s) continue;
        bool fixed = true;
        for (const State& a : initiators) {
            if (protocol.on_initiate(a, s).second != s) {
                fixed = false;
                break;
            }
        }
        if (fixed) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Passive states: the idle-update orbit never reaches S', so the node stays
// silent until contacted. Memoized walk over the functional graph of the
// idle update.
template <Protocol P>
std::vector<State> classify_passive(const P& protocol) {
    const std::vector<State> uni = protocol.enumerate_universe();
    std::unordered_map<State, std::uint32_t, StateHash> index;
    index.reserve(uni.size());
    for (std::uint32_t i = 0; i < uni.size(); ++i) index[uni[i]] = i;

    // 0 unknown, 1 in progress, 2 passive-orbit, 3 reaches S'
    std::vector<std::uint8_t> color(uni.size(), 0);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t i = 0; i < uni.size(); ++i) {
        if (color[i]) continue;
        std::uint32_t u = i;
        stack.clear();
        std::uint8_t verdict = 0;
        while (true) {
            if (protocol.is_initiator(uni[u])) {
                verdict = 3;
                break;
            }
            if (color[u] == 2 || color[u] == 3) {
                verdict = color[u];
                break;
            }
            if (color[u] == 1) {
                verdict = 2;  // closed a cycle that never met S'
                break;
            }
            color[u] = 1;
            stack.push_back(u);
            const State nxt = protocol.on_idle(uni[u]);
            auto it = index.find(nxt);
            if (it == index.end())
                throw ProtocolBugError("idle update escaped the universe: " + to_string(nxt));
            u = it->second;
        }
        for (std::uint32_t v : stack) color[v] = verdict;
    }
    std::vector<State> out;
    for (std::uint32_t i = 0; i < uni.size(); ++i)
        if (color[i] == 2) out.push_back(uni[i]);
    std::sort(out.begin(), out.end());
    return out;
}

// Aware states over a reachable universe: every state reachable through the
// successor relation (idle update, own initiations against any universe
// state, being contacted by any initiator in the universe, rejection) keeps
// the same belief bit. Computed by finding the belief-changing states and
// removing everything that can reach one.
template <Protocol P>
std::vector<State> classify_aware(const P& protocol, const std::vector<State>& universe) {
    std::vector<State> uni = universe;
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    std::unordered_map<State, std::uint32_t, StateHash> index;
    for (std::uint32_t i = 0; i < uni.size(); ++i) index[uni[i]] = i;

    auto ensure = [&](const State& s) {
        if (!index.count(s)) {
            index[s] = static_cast<std::uint32_t>(uni.size());
            uni.push_back(s);
        }
    };
    // Close the set under the successor maps so every edge stays inside. The
    // async fixed point is already closed; a synchronous period union may
    // pick up a few extra pair images.
    for (std::size_t grown = 0; grown != uni.size();) {
        grown = uni.size();
        for (std::size_t i = 0; i < grown; ++i) {
            const State s = uni[i];
            ensure(protocol.on_idle(s));
            if (protocol.is_initiator(s)) {
                ensure(protocol.on_rejected(s));
                for (std::size_t j = 0; j < grown; ++j) {
                    auto [x, y] = protocol.on_initiate(s, uni[j]);
                    ensure(x);
                    ensure(y);
                }
            }
        }
    }

    std::vector<State> inits;
    for (const State& s : uni)
        if (protocol.is_initiator(s)) inits.push_back(s);

    const std::uint32_t m = static_cast<std::uint32_t>(uni.size());
    std::vector<std::vector<std::uint32_t>> preds(m);
    std::vector<std::uint8_t> bad(m, 0);
    std::vector<std::uint32_t> succs;              // per-source distinct successors
    std::vector<std::uint32_t> seen_gen(m, 0);     // dedup stamps
    std::uint32_t gen = 0;
    auto note = [&](std::uint32_t from, const State& to) {
        const std::uint32_t t = index.at(to);
        if (t == from) return;
        if (protocol.belief_of(uni[from]) != protocol.belief_of(to)) bad[from] = 1;
        if (seen_gen[t] != gen) {
            seen_gen[t] = gen;
            succs.push_back(t);
        }
    };
    for (std::uint32_t i = 0; i < m; ++i) {
        const State& s = uni[i];
        succs.clear();
        ++gen;
        note(i, protocol.on_idle(s));
        if (protocol.is_initiator(s)) {
            note(i, protocol.on_rejected(s));
            for (const State& t : uni) note(i, protocol.on_initiate(s, t).first);
        }
        for (const State& a : inits) note(i, protocol.on_initiate(a, s).second);
        for (std::uint32_t t : succs) preds[t].push_back(i);
    }

    // aware = cannot reach any belief-changing state
    std::vector<std::uint8_t> not_aware = bad;
    std::vector<std::uint32_t> work;
    for (std::uint32_t i = 0; i < m; ++i)
        if (bad[i]) work.push_back(i);
    while (!work.empty()) {
        std::uint32_t u = work.back();
        work.pop_back();
        for (std::uint32_t p : preds[u]) {
            if (!not_aware[p]) {
                not_aware[p] = 1;
                work.push_back(p);
            }
        }
    }

    std::vector<State> out;
    for (const State& s : universe)
        if (!not_aware[index.at(s)]) out.push_back(s);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Full report: reachable sets plus the three classifications.
template <Protocol P>
StateSetReport analyze(const P& protocol, AnalyzerMode mode, const AnalyzerLimits& limits = {}) {
    StateSetReport rep = compute_reachable(protocol, mode, limits);
    rep.terminal_states = classify_terminal(protocol);
    rep.passive_states = classify_passive(protocol);
    rep.aware_states = classify_aware(protocol, rep.reachable);
    return rep;
}

}  // namespace mcsim
