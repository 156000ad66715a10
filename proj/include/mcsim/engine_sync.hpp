#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "mcsim/engine_async.hpp"  // SimResult, Snapshot
#include "mcsim/instance.hpp"
#include "mcsim/protocol.hpp"
#include "mcsim/rng.hpp"

namespace mcsim {

struct SyncSimConfig {
    std::uint64_t seed = 0;
    std::uint64_t max_rounds = 0;  // 0 = unbounded
    bool collect_states = true;
    std::vector<double> snapshot_times;  // in rounds
    std::function<void(double, std::uint64_t, const State&, const State&)> observer;
};

// Outcome of the per-round collision resolution. Every node plays exactly one
// role: initiator of an established pair, rejected initiator, recipient of
// exactly one established pair, or idle.
struct RoundResolution {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> established;  // (initiator, recipient)
    std::vector<std::uint32_t> rejected;
    std::vector<std::uint32_t> initiators;  // all initiators, ascending
    std::vector<std::int64_t> target_of;    // per node; -1 when not an initiator

    void reset(std::uint64_t n) {
        established.clear();
        rejected.clear();
        initiators.clear();
        target_of.assign(n, -1);
    }
};

struct SyncWorkspace {
    std::vector<std::uint8_t> is_init, in_pair;
    std::vector<std::uint64_t> offset, cursor;
    std::vector<std::uint32_t> suitors;
};

// Resolves one synchronous round from the pre-round states. Initiators draw
// targets in ascending node order; rule (a): a target which itself initiates
// rejects all suitors; rule (b): a non-initiating target accepts one suitor,
// chosen uniformly (a single draw per contested recipient, visited in
// ascending recipient order). Each initiation costs 1 regardless of outcome.
template <Protocol P>
void resolve_round_into(const P& protocol, const std::vector<State>& pre, Rng& rng,
                        SyncWorkspace& ws, RoundResolution& r) {
    const std::uint64_t n = pre.size();
    r.reset(n);
    ws.is_init.assign(n, 0);

    for (std::uint64_t i = 0; i < n; ++i) {
        if (protocol.is_initiator(pre[i])) {
            ws.is_init[i] = 1;
            r.initiators.push_back(static_cast<std::uint32_t>(i));
            r.target_of[i] = static_cast<std::int64_t>(rng.bounded_excluding(n, i));
        }
    }

    // bucket suitors by recipient (counting sort keeps suitors ascending)
    ws.offset.assign(n + 1, 0);
    for (std::uint32_t i : r.initiators) ++ws.offset[r.target_of[i] + 1];
    for (std::uint64_t j = 0; j < n; ++j) ws.offset[j + 1] += ws.offset[j];
    ws.suitors.resize(r.initiators.size());
    ws.cursor.assign(ws.offset.begin(), ws.offset.end() - 1);
    for (std::uint32_t i : r.initiators) ws.suitors[ws.cursor[r.target_of[i]]++] = i;

    for (std::uint64_t j = 0; j < n; ++j) {
        const std::uint64_t b = ws.offset[j], e = ws.offset[j + 1];
        if (b == e) continue;
        if (ws.is_init[j]) {
            for (std::uint64_t k = b; k < e; ++k) r.rejected.push_back(ws.suitors[k]);
            continue;
        }
        const std::uint64_t ell = e - b;
        const std::uint64_t winner = ell == 1 ? 0 : rng.bounded(ell);
        for (std::uint64_t k = b; k < e; ++k) {
            if (k - b == winner)
                r.established.emplace_back(ws.suitors[k], static_cast<std::uint32_t>(j));
            else
                r.rejected.push_back(ws.suitors[k]);
        }
    }
}

template <Protocol P>
RoundResolution resolve_round(const P& protocol, const std::vector<State>& pre, Rng& rng) {
    SyncWorkspace ws;
    RoundResolution r;
    resolve_round_into(protocol, pre, rng, ws, r);
    return r;
}

// Simulates the synchronous model: all nodes act at integer times, collisions
// resolved per round, every update reads pre-round states and commits
// simultaneously. Time in the result is measured in rounds.
template <Protocol P>
SimResult run_sync(const P& protocol, const Instance& inst, const SyncSimConfig& cfg) {
    const std::uint64_t n = inst.n;
    Rng rng(hash_combine(cfg.seed, 0x73796e63ull));

    std::vector<State> pre(n), post(n);
    std::unordered_set<State, StateHash> observed;
    SimResult res;

    std::uint64_t terminal_count = 0, informed_count = 0, incorrect = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        pre[i] = protocol.initial_state(inst.initial_bits[i]);
        post[i] = pre[i];
        if (cfg.collect_states) observed.insert(pre[i]);
        if (protocol.belief_of(pre[i]) != inst.majority_bit) ++incorrect;
        if (protocol.is_terminal(pre[i])) ++terminal_count;
        if (pre[i].tag() == 6) ++informed_count;
    }

    double cons_t = incorrect == 0 ? 0.0 : -1.0;
    std::uint64_t cons_n = 0, ncomm = 0, round = 0;
    if (terminal_count + informed_count >= (n + 9) / 10) res.spread_threshold_time = 0.0;
    if (terminal_count == n && incorrect == 0) {
        res.terminal_censored = false;
        res.terminal_time = 0.0;
    }

    // the state at a non-integer time t is the state after round floor(t)
    std::size_t next_snap = 0;
    auto flush_snapshots_before = [&](double upto) {
        while (next_snap < cfg.snapshot_times.size() && cfg.snapshot_times[next_snap] < upto) {
            res.snapshots.push_back(detail::take_snapshot(cfg.snapshot_times[next_snap], post, protocol));
            ++next_snap;
        }
    };

    auto apply = [&](std::uint64_t node, const State& neu) {
        const State& old = pre[node];
        if (neu == old) return;
        if (!protocol.contains(neu))
            throw ProtocolBugError("state escaped the declared universe: " + to_string(neu));
        if (cfg.observer) cfg.observer(static_cast<double>(round), node, old, neu);
        if (cfg.collect_states) observed.insert(neu);
        bool was_bad = protocol.belief_of(old) != inst.majority_bit;
        bool is_bad = protocol.belief_of(neu) != inst.majority_bit;
        if (was_bad && !is_bad) --incorrect;
        if (is_bad && !was_bad) ++incorrect;
        if (old.tag() == 6) --informed_count;
        if (neu.tag() == 6) ++informed_count;
        unsigned lo = protocol.audit_label(old), ln = protocol.audit_label(neu);
        if (ln != 0 && ln != lo && ln < res.audit_entries.size()) ++res.audit_entries[ln];
        if (protocol.is_terminal(neu) && !protocol.is_terminal(old)) ++terminal_count;
        post[node] = neu;
    };

    SyncWorkspace ws;
    RoundResolution rr;
    while (terminal_count < n && (cfg.max_rounds == 0 || round < cfg.max_rounds)) {
        ++round;
        flush_snapshots_before(static_cast<double>(round));
        resolve_round_into(protocol, pre, rng, ws, rr);
        ncomm += rr.initiators.size();
        for (std::uint32_t i : rr.initiators) {
            int tag = pre[i].tag();
            ++res.per_type_comm_counts[(tag >= 1 && tag <= 6) ? tag : 7];
        }
        res.events_processed += n - terminal_count;

        ws.in_pair.assign(n, 0);
        for (auto [i, j] : rr.established) {
            auto [a, b] = protocol.on_initiate(pre[i], pre[j]);
            apply(i, a);
            apply(j, b);
            ws.in_pair[i] = 1;
            ws.in_pair[j] = 1;
        }
        for (std::uint32_t i : rr.rejected) {
            apply(i, protocol.on_rejected(pre[i]));
            ws.in_pair[i] = 1;
        }
        // idle updates: everyone not party to a communication; terminal
        // states are fixed points of every update and are skipped
        for (std::uint64_t i = 0; i < n; ++i) {
            if (ws.in_pair[i]) continue;
            if (protocol.is_terminal(pre[i])) continue;
            apply(i, protocol.on_idle(pre[i]));
        }
        for (std::uint64_t i = 0; i < n; ++i) pre[i] = post[i];

        if (incorrect == 0) {
            if (cons_t < 0.0) {
                cons_t = static_cast<double>(round);
                cons_n = ncomm;
            }
        } else {
            cons_t = -1.0;
        }
        if (res.spread_threshold_time < 0.0 &&
            (terminal_count >= (n + 9) / 10 || informed_count >= (n + 9) / 10))
            res.spread_threshold_time = static_cast<double>(round);
        if (terminal_count == n && incorrect == 0) {
            res.terminal_censored = false;
            res.terminal_time = static_cast<double>(round);
            res.communications_at_terminal = ncomm;
        }
    }

    res.all_terminal = terminal_count == n;
    res.end_time = static_cast<double>(round);
    while (next_snap < cfg.snapshot_times.size()) {
        res.snapshots.push_back(detail::take_snapshot(cfg.snapshot_times[next_snap], post, protocol));
        ++next_snap;
    }
    res.communications_total = ncomm;
    res.final_incorrect_count = incorrect;
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
