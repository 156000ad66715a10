#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mcsim/params.hpp"
#include "mcsim/protocol.hpp"
#include "mcsim/state.hpp"

namespace mcsim {

// The synchronous protocol: expert selection with parity-alternating
// handshakes, M estimation rounds of length 2K+3, push then pull.
//
// State tuples, first element is the type:
//   aspirant  (1, eta, d, d', b', b)   eta in {-1,0,..,6}, d in [D], d' in [K_sel] u {0}
//   expert    (2, m, d, b)             m in [M] u {0}, d in [2K+3]
//   regular   (3, d, b)                d in [pull_interval]
//   terminal  (4, b)
//   candidate (5, b', b)
//   informed  (6, b)
//
// Every node increments its counter once per round, so an aspirant's d equals
// the global round index during expert selection and an expert's d encodes
// its position in the round structure: experts of level m >= 1 double at
// d in [1, 2K] and run the three candidate steps at d = 2K+1, 2K+2, 2K+3;
// level 0 experts are born into the candidate steps at d = 1, 2, 3. Level M
// experts reaching the candidate window push as informed nodes instead.
class SyncProtocol {
public:
    explicit SyncProtocol(const ParamSet& p) : p_(p) {
        if (p.protocol_id != ProtocolId::Sync)
            throw std::invalid_argument("params derived for a different protocol");
    }

    std::string_view name() const { return "sync"; }
    const ParamSet& params() const { return p_; }

    State initial_state(int b) const { return make_state(1, -1, 1, 0, -1, b); }

    bool is_initiator(const State& s) const {
        switch (s.tag()) {
            case 1: {
                const auto d = s[2], b = s[5];
                if (d <= 2) return b == 0;
                if (d <= 4) return b == 1;
                if (d >= p_.sel_phase_len) return false;
                return s[1] == -1 && s[3] < p_.k_sel && poll_parity_matches(d, b);
            }
            case 2: return true;
            case 3: return s[1] == p_.pull_interval;
            case 6: return true;
            default: return false;
        }
    }

    StatePair on_initiate(const State& s, const State& partner) const {
        switch (s.tag()) {
            case 1: {
                State me = s;
                const auto d = s[2];
                if (d == 1 || d == 3) {
                    me[4] = 1;  // case (ii): communicated
                } else if (d == 2 || d == 4) {
                    me[4] = (s[4] == 0) ? 0 : -1;
                } else {
                    // poll the partner's test bit; -1 carries no information
                    const int tb = partner.tag() == 1 ? partner[4] : -1;
                    if (tb == 0) me[3] += 1;
                    else if (tb == 1) me[1] = 3;
                }
                me[2] += 1;
                return {me, partner_tick(partner)};
            }
            case 2: {
                const auto m = s[1], d = s[2];
                const int b = s[3];
                if (m == p_.m_levels && d > 2 * p_.k_round) {
                    // the level-M expert acts as an informed node
                    if (partner.tag() == 4) return {make_state(4, b), partner};
                    return {make_state(6, b), make_state(6, b)};
                }
                const int step = cand_step(m, d);
                if (step == 1) {
                    State j = partner;
                    if (partner.tag() == 3) j = make_state(5, -1, b);
                    else j = partner_tick(partner);
                    return {make_state(2, m, d + 1, b), j};
                }
                if (step == 2) {
                    State j = partner;
                    if (partner.tag() == 5) j = make_state(5, b, partner[2]);
                    else j = partner_tick(partner);
                    return {make_state(2, m, d + 1, b), j};
                }
                if (step == 3) {
                    State j = partner_tick(partner);
                    if (partner.tag() == 5 && partner[1] != -1)
                        j = make_state(2, m + 1, 1, maj3(partner[2], partner[1], b));
                    return {make_state(3, 1, b), j};  // the old expert retires
                }
                // rumor doubling: the contacted node mirrors the expert
                State j = partner;
                if (partner.tag() == 3) j = make_state(2, m, d + 1, b);
                else j = partner_tick(partner);
                return {make_state(2, m, d + 1, b), j};
            }
            case 3: {
                if (partner.tag() == 4) return {partner, partner};
                return {make_state(3, 1, s[2]), partner_tick(partner)};
            }
            case 6: {
                if (partner.tag() == 4) return {make_state(4, s[1]), partner};
                // the non-terminal recipient adopts the pushed state; under
                // the collision rules such a recipient never itself initiates
                return {s, make_state(6, s[1])};
            }
            default:
                return {s, partner};
        }
    }

    State on_idle(const State& s) const {
        switch (s.tag()) {
            case 1: {
                const auto d = s[2];
                if (d >= p_.sel_phase_len)
                    return s[1] == 2 ? make_state(2, 0, 1, s[5]) : make_state(3, 1, s[5]);
                State me = s;
                if (d >= 5 && s[1] == -1 && s[3] == p_.k_sel && poll_parity_matches(d, s[5]))
                    me[1] = 2;  // future expert
                me[2] += 1;
                return me;
            }
            case 2: return on_rejected(s);  // experts always initiate; kept total
            case 3: return s[1] < p_.pull_interval ? make_state(3, s[1] + 1, s[2]) : make_state(3, 1, s[2]);
            case 5: return make_state(3, 1, s[2]);  // not contacted this step
            default: return s;
        }
    }

    State on_rejected(const State& s) const {
        switch (s.tag()) {
            case 1: {
                const auto d = s[2];
                if (d >= p_.sel_phase_len)  // kept total; aspirants no longer initiate here
                    return s[1] == 2 ? make_state(2, 0, 1, s[5]) : make_state(3, 1, s[5]);
                State me = s;
                if (d == 1 || d == 3) me[4] = 0;  // case (i): rejected
                else if (d == 2 || d == 4) me[4] = (s[4] == 1) ? 1 : -1;
                me[2] += 1;
                return me;
            }
            case 2: {
                const auto m = s[1], d = s[2];
                if (m == p_.m_levels && d > 2 * p_.k_round) return make_state(4, s[3]);
                if (cand_step(m, d) == 3) return make_state(3, 1, s[3]);
                return make_state(2, m, d + 1, s[3]);
            }
            case 3: return make_state(3, 1, s[2]);  // counter wraps modulo the interval
            case 6: return make_state(4, s[1]);
            default: return s;
        }
    }

    int belief_of(const State& s) const {
        switch (s.tag()) {
            case 1: return s[5];
            case 2: return s[3];
            case 3: case 5: return s[2];
            default: return s[1];
        }
    }

    bool is_terminal(const State& s) const { return s.tag() == 4; }

    bool contains(const State& s) const {
        auto bit = [](std::int32_t v) { return v == 0 || v == 1; };
        auto tb = [](std::int32_t v) { return v >= -1 && v <= 1; };
        switch (s.tag()) {
            case 1:
                return s[1] >= -1 && s[1] <= 6 && s[2] >= 1 && s[2] <= p_.sel_phase_len &&
                       s[3] >= 0 && s[3] <= p_.k_sel && tb(s[4]) && bit(s[5]) && s[6] == 0;
            case 2:
                return s[1] >= 0 && s[1] <= p_.m_levels && s[2] >= 1 && s[2] <= p_.round_len &&
                       bit(s[3]) && s[4] == 0;
            case 3:
                return s[1] >= 1 && s[1] <= p_.pull_interval && bit(s[2]) && s[3] == 0;
            case 4: return bit(s[1]) && s[2] == 0;
            case 5: return tb(s[1]) && bit(s[2]) && s[3] == 0;
            case 6: return bit(s[1]) && s[2] == 0;
            default: return false;
        }
    }

    std::uint64_t universe_size() const { return p_.universe_size; }

    std::vector<State> enumerate_universe() const {
        std::vector<State> all;
        all.reserve(universe_size());
        for (int b = 0; b <= 1; ++b) {
            for (int eta = -1; eta <= 6; ++eta)
                for (std::int64_t d = 1; d <= p_.sel_phase_len; ++d)
                    for (std::int64_t dp = 0; dp <= p_.k_sel; ++dp)
                        for (int bp = -1; bp <= 1; ++bp)
                            all.push_back(make_state(1, eta, d, dp, bp, b));
            for (std::int64_t m = 0; m <= p_.m_levels; ++m)
                for (std::int64_t d = 1; d <= p_.round_len; ++d)
                    all.push_back(make_state(2, m, d, b));
            for (std::int64_t d = 1; d <= p_.pull_interval; ++d)
                all.push_back(make_state(3, d, b));
            all.push_back(make_state(4, b));
            for (int bp = -1; bp <= 1; ++bp) all.push_back(make_state(5, bp, b));
            all.push_back(make_state(6, b));
        }
        return all;
    }

    // label 1: became a level-0 expert; label 2: became a level >= 1 expert
    unsigned audit_label(const State& s) const {
        if (s.tag() != 2) return 0;
        return s[1] == 0 ? 1u : 2u;
    }

private:
    // At poll steps, nodes with belief 0 sample at even times and nodes with
    // belief 1 at odd times.
    static bool poll_parity_matches(std::int64_t d, int b) {
        return (d % 2 == 0) ? b == 0 : b == 1;
    }

    // three candidate steps of a round: returns 1..3, or 0 when doubling.
    // Level 0 experts are born directly into the candidate steps.
    int cand_step(std::int64_t m, std::int64_t d) const {
        if (m == 0 && d <= 3) return static_cast<int>(d);
        const auto rel = d - 2 * p_.k_round;
        return rel >= 1 && rel <= 3 ? static_cast<int>(rel) : 0;
    }

    static int maj3(int a, int b, int c) { return a + b + c >= 2 ? 1 : 0; }

    // Counter bookkeeping of a contacted node that does not otherwise change:
    // aspirants and regular nodes advance their per-round counters.
    State partner_tick(const State& s) const {
        switch (s.tag()) {
            case 1: {
                if (s[2] >= p_.sel_phase_len)
                    return s[1] == 2 ? make_state(2, 0, 1, s[5]) : make_state(3, 1, s[5]);
                State me = s;
                me[2] += 1;
                return me;
            }
            case 3:
                return s[1] < p_.pull_interval ? make_state(3, s[1] + 1, s[2]) : make_state(3, 1, s[2]);
            default:
                return s;
        }
    }

    ParamSet p_;
};

static_assert(Protocol<SyncProtocol>);

}  // namespace mcsim
