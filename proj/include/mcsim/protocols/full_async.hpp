#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mcsim/params.hpp"
#include "mcsim/protocol.hpp"
#include "mcsim/state.hpp"

namespace mcsim {

// The full asynchronous protocol: six node types, expert types xi in [4]
// drawn by von Neumann unbiasing on bit quadruples, expert candidates with
// clock-ring expiry, informed push and regular pull.
//
// State tuples, first element is the type; the second-to-last element is
// always the node's initial bit and the last its belief bit:
//   aspirant  (1, d, xi, chi, b', b'', b''', fb, b)
//   expert    (2, m, d, xi, fb, b)      m in [M] u {0}, d in [2K+7]
//   regular   (3, d, xi, psi, fb, b)    d in [ceil((log2 log2 n)^2)]
//   terminal  (4, fb, b)
//   candidate (5, m, d, xi, b1, b2, b3, fb, b)   d in [candidate_expiry]
//   informed  (6, fb, b)
//
// Phase chi=3 aspirants count rings without initiating; experts always
// initiate; candidates never initiate. An expert whose counter sits at 2K+7
// makes one final communication (feeding candidate slot xi, or converting the
// contacted node to informed at level M) and then retires.
class FullAsyncProtocol {
public:
    explicit FullAsyncProtocol(const ParamSet& p) : p_(p) {
        if (p.protocol_id != ProtocolId::FullAsync)
            throw std::invalid_argument("params derived for a different protocol");
    }

    std::string_view name() const { return "full-async"; }
    const ParamSet& params() const { return p_; }

    State initial_state(int b) const { return make_state(1, 1, 0, 1, -1, -1, -1, b, b); }

    bool is_initiator(const State& s) const {
        switch (s.tag()) {
            case 1: return s[3] != 3;  // waiting aspirants stay silent
            case 2: return true;
            case 3: return s[1] == p_.pull_interval;
            case 6: return true;
            default: return false;
        }
    }

    StatePair on_initiate(const State& s, const State& partner) const {
        switch (s.tag()) {
            case 1: {
                const int fbj = initial_bit_of(partner);
                if (s[3] == 1) return {aspirant_quadruple_step(s, fbj), partner};
                if (s[3] == 2) return {aspirant_pair_step(s, fbj), partner};
                return {s, partner};
            }
            case 2: {
                const auto m = s[1], d = s[2], xi = s[3];
                const int fb = s[4], b = s[5];
                State me;
                if (d < p_.expert_counter_max) {
                    me = make_state(2, m, d + 1, xi, fb, b);
                } else if (m < p_.m_levels) {
                    me = make_state(3, 1, xi, 1, fb, b);  // retires with psi = 1
                } else {
                    me = make_state(6, fb, b);
                }
                return {me, contacted_by_expert(s, partner)};
            }
            case 3: {
                if (partner.tag() == 4) return {partner, partner};  // adopt the terminal state
                return {make_state(3, 1, s[2], s[3], s[4], s[5]), partner};
            }
            case 6: {
                if (partner.tag() == 4 || partner.tag() == 6)
                    return {make_state(4, s[1], s[2]), partner};
                State j = partner;
                if (partner.tag() == 3) j = make_state(6, partner[4], s[2]);
                return {s, j};
            }
            default:
                return {s, partner};
        }
    }

    State on_idle(const State& s) const {
        switch (s.tag()) {
            case 1:
                if (s[3] != 3) return s;  // chi in {1,2} always initiates
                if (s[1] < p_.t_aspirant) {
                    State me = s;
                    me[1] += 1;
                    return me;
                }
                return make_state(2, 0, 1, xi_or_default(s[2]), s[7], s[7]);
            case 3:
                if (s[1] < p_.pull_interval)
                    return make_state(3, s[1] + 1, s[2], s[3], s[4], s[5]);
                return s;
            case 5:
                if (s[2] < p_.candidate_expiry) {
                    State me = s;
                    me[2] += 1;
                    return me;
                }
                return make_state(3, 1, s[3], 1, s[7], s[8]);
            default:
                return s;
        }
    }

    State on_rejected(const State& s) const { return s; }

    int belief_of(const State& s) const {
        switch (s.tag()) {
            case 1: case 5: return s[8];
            case 2: case 3: return s[5];
            default: return s[2];
        }
    }

    bool is_terminal(const State& s) const { return s.tag() == 4; }

    bool contains(const State& s) const {
        auto bit = [](std::int32_t v) { return v == 0 || v == 1; };
        auto tb = [](std::int32_t v) { return v >= -1 && v <= 1; };
        switch (s.tag()) {
            case 1:
                return s[1] >= 1 && s[1] <= p_.t_aspirant && s[2] >= 0 && s[2] <= 4 &&
                       s[3] >= 1 && s[3] <= 3 && tb(s[4]) && tb(s[5]) && tb(s[6]) &&
                       bit(s[7]) && bit(s[8]);
            case 2:
                return s[1] >= 0 && s[1] <= p_.m_levels && s[2] >= 1 &&
                       s[2] <= p_.expert_counter_max && s[3] >= 1 && s[3] <= 4 &&
                       bit(s[4]) && bit(s[5]) && s[6] == 0;
            case 3:
                return s[1] >= 1 && s[1] <= p_.pull_interval && s[2] >= 1 && s[2] <= 4 &&
                       (s[3] == 0 || s[3] == 1) && bit(s[4]) && bit(s[5]) && s[6] == 0;
            case 4:
                return bit(s[1]) && bit(s[2]) && s[3] == 0;
            case 5:
                return s[1] >= 1 && s[1] <= p_.m_levels && s[2] >= 1 &&
                       s[2] <= p_.candidate_expiry && s[3] >= 1 && s[3] <= 4 && tb(s[4]) &&
                       tb(s[5]) && tb(s[6]) && bit(s[7]) && bit(s[8]);
            case 6:
                return bit(s[1]) && bit(s[2]) && s[3] == 0;
            default:
                return false;
        }
    }

    std::uint64_t universe_size() const { return p_.universe_size; }

    std::vector<State> enumerate_universe() const {
        std::vector<State> all;
        all.reserve(universe_size());
        const int tbs[3] = {-1, 0, 1};
        for (int fb = 0; fb <= 1; ++fb)
            for (int b = 0; b <= 1; ++b) {
                for (std::int64_t d = 1; d <= p_.t_aspirant; ++d)
                    for (int xi = 0; xi <= 4; ++xi)
                        for (int chi = 1; chi <= 3; ++chi)
                            for (int b1 : tbs)
                                for (int b2 : tbs)
                                    for (int b3 : tbs)
                                        all.push_back(make_state(1, d, xi, chi, b1, b2, b3, fb, b));
                for (std::int64_t m = 0; m <= p_.m_levels; ++m)
                    for (std::int64_t d = 1; d <= p_.expert_counter_max; ++d)
                        for (int xi = 1; xi <= 4; ++xi)
                            all.push_back(make_state(2, m, d, xi, fb, b));
                for (std::int64_t d = 1; d <= p_.pull_interval; ++d)
                    for (int xi = 1; xi <= 4; ++xi)
                        for (int psi = 0; psi <= 1; ++psi)
                            all.push_back(make_state(3, d, xi, psi, fb, b));
                all.push_back(make_state(4, fb, b));
                for (std::int64_t m = 1; m <= p_.m_levels; ++m)
                    for (std::int64_t d = 1; d <= p_.candidate_expiry; ++d)
                        for (int xi = 1; xi <= 4; ++xi)
                            for (int b1 : tbs)
                                for (int b2 : tbs)
                                    for (int b3 : tbs)
                                        all.push_back(make_state(5, m, d, xi, b1, b2, b3, fb, b));
                all.push_back(make_state(6, fb, b));
            }
        return all;
    }

    // labels 1..4: became a level-0 expert of type xi; 5: level >= 1 expert
    unsigned audit_label(const State& s) const {
        if (s.tag() != 2) return 0;
        if (s[1] == 0) return static_cast<unsigned>(s[3]);
        return 5u;
    }

private:
    int initial_bit_of(const State& s) const {
        switch (s.tag()) {
            case 1: case 5: return s[7];
            case 2: case 3: return s[4];
            default: return s[1];
        }
    }

    // chi = 1: collect a bit quadruple; exactly one or three 1-bits fixes the
    // expert type as the position of the odd bit out.
    State aspirant_quadruple_step(const State& s, int fbj) const {
        State me = s;
        if (s[4] == -1) { me[4] = fbj; return me; }
        if (s[5] == -1) { me[5] = fbj; return me; }
        if (s[6] == -1) { me[6] = fbj; return me; }
        const int q[4] = {s[4], s[5], s[6], fbj};
        const int ones = q[0] + q[1] + q[2] + q[3];
        me[4] = me[5] = me[6] = -1;
        if (ones == 1 || ones == 3) {
            const int odd = ones == 1 ? 1 : 0;
            for (int v = 0; v < 4; ++v)
                if (q[v] == odd) { me[2] = v + 1; break; }
            me[3] = 2;  // start the pair game with cleared test bits
        }
        return me;
    }

    // chi = 2: collect bit pairs; K_sel pairs (0,1) before the first (1,0)
    // selects the node as a level 0 expert (via the waiting phase chi = 3).
    State aspirant_pair_step(const State& s, int fbj) const {
        const auto d = s[1];
        const int bp = s[4];
        State me = s;
        if (d > p_.k_sel) {  // counter exhausted: move to the waiting phase
            me[1] = 1;
            me[3] = 3;
            return me;
        }
        if (bp == fbj) { me[4] = -1; return me; }
        if (bp == -1) { me[4] = fbj; return me; }
        if (bp == 0 && fbj == 1) {
            me[4] = -1;
            me[1] = d + 1;
            if (d + 1 == p_.k_sel + 1) {
                me[1] = 1;
                me[3] = 3;
            }
            return me;
        }
        // (b', fb_j) = (1, 0): the node gives up
        return make_state(3, 1, xi_or_default(s[2]), 0, s[7], s[7]);
    }

    // Encodable aspirant states with chi >= 2 but xi = 0 are unreachable;
    // keep their transitions inside the universe anyway.
    static std::int32_t xi_or_default(std::int32_t xi) { return xi == 0 ? 1 : xi; }

    // Partner update when contacted by an expert with pre-state e.
    State contacted_by_expert(const State& e, const State& j) const {
        const auto m = e[1], d = e[2], xi = e[3];
        const int b = e[5];
        if (d != p_.expert_counter_max) {
            // rumor spreading recruits fresh regular nodes into the level;
            // only levels >= 1 spread (level 0 experts are selection-only)
            if (m >= 1 && j.tag() == 3 && j[3] == 0)
                return make_state(2, m, d + 1, j[2], j[4], b);
            return j;
        }
        if (m < p_.m_levels) {
            if (xi > 3) return j;  // type-4 experts feed no candidate slot
            if (j.tag() == 3 && j[3] == 0) {
                State c = make_state(5, m + 1, 1, j[2], -1, -1, -1, j[4], b);
                c[3 + xi] = b;
                return c;
            }
            if (j.tag() == 5 && j[1] == m + 1 && j[3 + xi] == -1) {
                State c = j;
                c[3 + xi] = b;
                if (c[4] != -1 && c[5] != -1 && c[6] != -1)
                    return make_state(2, m + 1, 1, c[3], c[7], maj3(c[4], c[5], c[6]));
                return c;
            }
            return j;
        }
        // level M expert at its final counter: the contacted node becomes informed
        if (j.tag() == 3) return make_state(6, j[4], b);
        return j;
    }

    static int maj3(int a, int b, int c) { return a + b + c >= 2 ? 1 : 0; }

    ParamSet p_;
};

static_assert(Protocol<FullAsyncProtocol>);

}  // namespace mcsim
