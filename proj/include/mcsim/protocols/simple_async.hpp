#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mcsim/params.hpp"
#include "mcsim/protocol.hpp"
#include "mcsim/state.hpp"

namespace mcsim {

// The simple asynchronous protocol: aspirant -> expert/regular -> terminal.
//
// State tuples, first element is the type:
//   aspirant  (1, d, b', b)   d in [A], b' in {-1,0,1}
//   expert    (2, xi, d, d', b)  xi in {1,2}, d and d' in [P]
//   regular   (3, d, b)       d in [L]
//   terminal  (4, b)
// with A = ceil(log2 log2 n), P = ceil(C0 log2 n), L = ceil(log2 n).
class SimpleAsyncProtocol {
public:
    explicit SimpleAsyncProtocol(const ParamSet& p) : p_(p) {
        if (p.protocol_id != ProtocolId::SimpleAsync)
            throw std::invalid_argument("params derived for a different protocol");
    }

    std::string_view name() const { return "simple-async"; }
    const ParamSet& params() const { return p_; }

    State initial_state(int b) const { return make_state(1, 1, -1, b); }

    bool is_initiator(const State& s) const {
        switch (s.tag()) {
            case 1: return true;
            case 2: return s[1] == 2 || s[2] < p_.expert_poll_max;
            case 3: return s[1] == p_.regular_period;
            default: return false;
        }
    }

    StatePair on_initiate(const State& s, const State& partner) const {
        switch (s.tag()) {
            case 1: return {aspirant_step(s, belief_of(partner)), partner};
            case 2:
                if (s[1] == 1) {
                    // estimation: count 1-beliefs among polled nodes
                    State e = s;
                    e[2] += 1;
                    if (belief_of(partner) == 1 && e[3] < p_.expert_poll_max) e[3] += 1;
                    return {e, partner};
                } else {
                    // pushing: contacted regular nodes terminalize with the
                    // expert's belief
                    State pushed = partner;
                    if (partner.tag() == 3) pushed = make_state(4, s[4]);
                    State e = s;
                    if (s[2] >= p_.push_len) {
                        e = make_state(4, s[4]);
                    } else {
                        e[2] += 1;
                    }
                    return {e, pushed};
                }
            case 3:
                // pull: adopt a terminal partner's state, otherwise wrap the
                // counter (increase by 1 modulo L)
                if (partner.tag() == 4) return {partner, partner};
                return {make_state(3, 1, s[2]), partner};
            default:
                return {s, partner};
        }
    }

    State on_idle(const State& s) const {
        switch (s.tag()) {
            case 2:
                if (s[1] == 1 && s[2] == p_.expert_poll_max) {
                    // estimation done: enter the pushing phase with the
                    // thresholded belief
                    int b = static_cast<double>(s[3]) > p_.expert_threshold ? 1 : 0;
                    return make_state(2, 2, 1, s[3], b);
                }
                return s;
            case 3:
                if (s[1] < p_.regular_period) return make_state(3, s[1] + 1, s[2]);
                return s;
            default:
                return s;
        }
    }

    State on_rejected(const State& s) const { return s; }

    int belief_of(const State& s) const {
        switch (s.tag()) {
            case 1: return s[3];
            case 2: return s[4];
            case 3: return s[2];
            default: return s[1];
        }
    }

    bool is_terminal(const State& s) const { return s.tag() == 4; }

    bool contains(const State& s) const {
        auto bit = [](std::int32_t v) { return v == 0 || v == 1; };
        switch (s.tag()) {
            case 1:
                return s[1] >= 1 && s[1] <= p_.aspirant_target && s[2] >= -1 && s[2] <= 1 &&
                       bit(s[3]) && s[4] == 0 && s[5] == 0;
            case 2:
                return (s[1] == 1 || s[1] == 2) && s[2] >= 1 && s[2] <= p_.expert_poll_max &&
                       s[3] >= 1 && s[3] <= p_.expert_poll_max && bit(s[4]) && s[5] == 0;
            case 3:
                return s[1] >= 1 && s[1] <= p_.regular_period && bit(s[2]) && s[3] == 0;
            case 4:
                return bit(s[1]) && s[2] == 0;
            default:
                return false;
        }
    }

    std::uint64_t universe_size() const { return p_.universe_size; }

    std::vector<State> enumerate_universe() const {
        std::vector<State> all;
        all.reserve(universe_size());
        for (int b = 0; b <= 1; ++b) {
            for (std::int64_t d = 1; d <= p_.aspirant_target; ++d)
                for (int bp = -1; bp <= 1; ++bp)
                    all.push_back(make_state(1, d, bp, b));
            for (int xi = 1; xi <= 2; ++xi)
                for (std::int64_t d = 1; d <= p_.expert_poll_max; ++d)
                    for (std::int64_t dp = 1; dp <= p_.expert_poll_max; ++dp)
                        all.push_back(make_state(2, xi, d, dp, b));
            for (std::int64_t d = 1; d <= p_.regular_period; ++d)
                all.push_back(make_state(3, d, b));
            all.push_back(make_state(4, b));
        }
        return all;
    }

    // label 1: node entered the expert family
    unsigned audit_label(const State& s) const { return s.tag() == 2 ? 1u : 0u; }

private:
    // One pair observation of the aspirant's test-bit automaton. b'' is the
    // belief of the contacted node.
    State aspirant_step(const State& s, int b2) const {
        const std::int32_t d = s[1], bp = s[2], b = s[3];
        if (bp == b2) return make_state(1, d, -1, b);
        if (bp == -1) return make_state(1, d, b2, b);
        if (bp == 0 && b2 == 1) {
            if (d + 1 >= p_.aspirant_target) return make_state(2, 1, 1, 1, b);
            return make_state(1, d + 1, -1, b);
        }
        // (b', b'') = (1, 0): the node gives up and becomes regular
        return make_state(3, 1, b);
    }

    ParamSet p_;
};

static_assert(Protocol<SimpleAsyncProtocol>);

}  // namespace mcsim
