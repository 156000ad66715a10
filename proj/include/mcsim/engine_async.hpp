#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "mcsim/instance.hpp"
#include "mcsim/protocol.hpp"
#include "mcsim/rng.hpp"
#include "mcsim/state.hpp"

namespace mcsim {

struct AsyncSimConfig {
    std::uint64_t seed = 0;
    double horizon = std::numeric_limits<double>::infinity();
    bool suppress_terminal_rings = true;
    bool collect_states = true;
    std::vector<double> snapshot_times;  // sorted; exact per-state counts at these times
    // Optional per-event observer: (time, node, old state, new state).
    // Null in normal runs; tests use it for lineage and audit checks.
    std::function<void(double, std::uint64_t, const State&, const State&)> observer;
};

struct StateCount {
    State state;
    std::uint64_t count;
};

struct Snapshot {
    double time;
    std::vector<StateCount> counts;  // sorted by state
};

struct SimResult {
    std::uint64_t communications_total = 0;
    double consensus_time = -1.0;  // negative when censored
    double terminal_time = -1.0;
    bool consensus_censored = true;
    bool terminal_censored = true;
    std::uint64_t communications_at_consensus = 0;
    std::uint64_t communications_at_terminal = 0;
    std::uint64_t final_incorrect_count = 0;
    std::array<std::uint64_t, 8> per_type_comm_counts{};  // by initiator type tag, [7] = other
    std::array<std::uint64_t, 8> audit_entries{};         // entries per audit label
    std::vector<State> states_observed;                   // sorted, when collected
    std::uint64_t events_processed = 0;
    double end_time = 0.0;
    bool all_terminal = false;
    double spread_threshold_time = -1.0;  // first time terminal or informed count reaches n/10
    std::vector<std::uint64_t> ring_counts;
    std::vector<Snapshot> snapshots;

    bool success() const { return !terminal_censored && final_incorrect_count == 0; }
};

// Draws the next ring of the superposed Poisson processes: the gap is
// exponential with rate = number of active clocks, the ringing position is
// uniform. Equivalent in law to n independent unit-rate clocks.
struct NextEvent {
    double time;
    std::uint64_t active_index;
};

inline NextEvent next_event(double now, std::uint64_t active_count, Rng& rng) {
    double gap = rng.exponential(static_cast<double>(active_count));
    std::uint64_t idx = rng.bounded(active_count);
    return {now + gap, idx};
}

// Exact per-state counts at one of the recorded snapshot times.
inline const Snapshot& frequency_histogram(const SimResult& result, double time) {
    for (const auto& snap : result.snapshots)
        if (snap.time == time) return snap;
    throw std::invalid_argument("no snapshot was recorded at the requested time");
}

namespace detail {

template <Protocol P>
Snapshot take_snapshot(double t, const std::vector<State>& st, const P&) {
    std::vector<State> sorted = st;
    std::sort(sorted.begin(), sorted.end());
    Snapshot snap;
    snap.time = t;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        snap.counts.push_back({sorted[i], j - i});
        i = j;
    }
    return snap;
}

}  // namespace detail

// Simulates the asynchronous model: unit-rate Poisson clocks, uniform
// matching, unit cost per initiated communication. One seeded stream is
// consumed strictly in event order (gap, ringing node, partner), so a run is
// a pure function of (protocol, instance, config).
template <Protocol P>
SimResult run_async(const P& protocol, const Instance& inst, const AsyncSimConfig& cfg) {
    const std::uint64_t n = inst.n;
    Rng rng(hash_combine(cfg.seed, 0x6173796eull));

    std::vector<State> st(n);
    std::vector<std::uint64_t> active;      // node ids with live clocks
    std::vector<std::uint64_t> pos(n);      // position of node in `active`
    std::unordered_set<State, StateHash> observed;

    SimResult res;
    res.ring_counts.assign(n, 0);

    std::uint64_t terminal_count = 0;
    std::uint64_t informed_count = 0;  // type tag 6
    std::uint64_t incorrect = 0;

    for (std::uint64_t i = 0; i < n; ++i) {
        st[i] = protocol.initial_state(inst.initial_bits[i]);
        if (cfg.collect_states) observed.insert(st[i]);
        if (protocol.belief_of(st[i]) != inst.majority_bit) ++incorrect;
        if (protocol.is_terminal(st[i])) ++terminal_count;
        if (st[i].tag() == 6) ++informed_count;
    }
    const bool suppress = cfg.suppress_terminal_rings;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (suppress && protocol.is_terminal(st[i])) {
            pos[i] = static_cast<std::uint64_t>(-1);
        } else {
            pos[i] = active.size();
            active.push_back(i);
        }
    }

    double t = 0.0;
    std::uint64_t ncomm = 0;
    // consensus bookkeeping: a candidate time stands while the incorrect
    // count stays at zero
    double cons_t = incorrect == 0 ? 0.0 : -1.0;
    std::uint64_t cons_n = 0;
    if (terminal_count + informed_count >= (n + 9) / 10) res.spread_threshold_time = 0.0;

    if (terminal_count == n) {
        res.all_terminal = true;
        if (incorrect == 0) {
            res.terminal_censored = false;
            res.terminal_time = 0.0;
        }
    }

    std::size_t next_snap = 0;
    auto flush_snapshots = [&](double upto) {
        while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] < upto) {
            res.snapshots.push_back(detail::take_snapshot(cfg.snapshot_times[next_snap], st, protocol));
            ++next_snap;
        }
    };

    auto remove_from_active = [&](std::uint64_t node) {
        std::uint64_t p = pos[node];
        std::uint64_t last = active.back();
        active[p] = last;
        pos[last] = p;
        active.pop_back();
        pos[node] = static_cast<std::uint64_t>(-1);
    };

    auto apply = [&](std::uint64_t node, const State& neu) {
        const State& old = st[node];
        if (neu == old) return;
        if (!protocol.contains(neu))
            throw ProtocolBugError("state escaped the declared universe: " + to_string(neu));
        if (cfg.observer) cfg.observer(t, node, old, neu);
        if (cfg.collect_states) observed.insert(neu);
        bool was_bad = protocol.belief_of(old) != inst.majority_bit;
        bool is_bad = protocol.belief_of(neu) != inst.majority_bit;
        if (was_bad && !is_bad) --incorrect;
        if (is_bad && !was_bad) ++incorrect;
        if (old.tag() == 6) --informed_count;
        if (neu.tag() == 6) ++informed_count;
        unsigned lo = protocol.audit_label(old), ln = protocol.audit_label(neu);
        if (ln != 0 && ln != lo && ln < res.audit_entries.size()) ++res.audit_entries[ln];
        bool was_term = protocol.is_terminal(old);
        bool now_term = protocol.is_terminal(neu);
        st[node] = neu;
        if (now_term && !was_term) {
            ++terminal_count;
            if (suppress) remove_from_active(node);
        }
    };

    bool horizon_hit = false;
    while (!active.empty() && terminal_count < n) {
        const std::uint64_t rate_count = suppress ? active.size() : n;
        auto ev = next_event(t, rate_count, rng);
        if (ev.time >= cfg.horizon) {
            horizon_hit = true;
            break;
        }
        flush_snapshots(ev.time);
        t = ev.time;
        const std::uint64_t node = active[ev.active_index];
        ++res.events_processed;
        ++res.ring_counts[node];

        const State s = st[node];
        if (protocol.is_initiator(s)) {
            const std::uint64_t j = rng.bounded_excluding(n, node);
            ++ncomm;
            int tag = s.tag();
            ++res.per_type_comm_counts[(tag >= 1 && tag <= 6) ? tag : 7];
            auto [a, b] = protocol.on_initiate(s, st[j]);
            apply(node, a);
            apply(j, b);
        } else {
            apply(node, protocol.on_idle(s));
        }

        if (incorrect == 0) {
            if (cons_t < 0.0) {
                cons_t = t;
                cons_n = ncomm;
            }
        } else {
            cons_t = -1.0;
        }
        if (res.spread_threshold_time < 0.0 && (terminal_count >= (n + 9) / 10 || informed_count >= (n + 9) / 10))
            res.spread_threshold_time = t;
        if (terminal_count == n) {
            res.all_terminal = true;
            if (incorrect == 0) {
                res.terminal_censored = false;
                res.terminal_time = t;
                res.communications_at_terminal = ncomm;
            }
        }
    }

    if (terminal_count == n) res.all_terminal = true;
    res.end_time = horizon_hit ? cfg.horizon : t;
    // snapshot times at or beyond the end of the run evaluate the final state
    while (next_snap < cfg.snapshot_times.size()) {
        res.snapshots.push_back(detail::take_snapshot(cfg.snapshot_times[next_snap], st, protocol));
        ++next_snap;
    }

    res.communications_total = ncomm;
    res.final_incorrect_count = incorrect;
    // consensus holds only if the zero-incorrect stretch lasted to the end
    if (incorrect == 0 && cons_t >= 0.0) {
        res.consensus_censored = false;
        res.consensus_time = cons_t;
        res.communications_at_consensus = cons_n;
    }
    if (cfg.collect_states) {
        res.states_observed.assign(observed.begin(), observed.end());
        std::sort(res.states_observed.begin(), res.states_observed.end());
    }
    return res;
}

}  // namespace mcsim
