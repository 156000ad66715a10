#pragma once

#include <variant>

#include "mcsim/params.hpp"
#include "mcsim/protocols/baseline.hpp"
#include "mcsim/protocols/full_async.hpp"
#include "mcsim/protocols/simple_async.hpp"
#include "mcsim/protocols/sync.hpp"

namespace mcsim {

using AnyProtocol = std::variant<SimpleAsyncProtocol, SyncProtocol, FullAsyncProtocol, BaselineProtocol>;

inline AnyProtocol make_protocol(const ParamSet& params) {
    switch (params.protocol_id) {
        case ProtocolId::SimpleAsync: return SimpleAsyncProtocol(params);
        case ProtocolId::Sync: return SyncProtocol(params);
        case ProtocolId::FullAsync: return FullAsyncProtocol(params);
        case ProtocolId::Baseline3State: return BaselineProtocol();
    }
    throw std::invalid_argument("unknown protocol");
}

inline bool uses_sync_engine(ProtocolId id) { return id == ProtocolId::Sync; }

// Safety-net horizon (time units for the asynchronous engine, rounds for the
// synchronous one). Runs with terminal states normally finish well before it;
// the baseline has no terminal states and always runs to the horizon.
inline double default_horizon(const ParamSet& p) {
    switch (p.protocol_id) {
        case ProtocolId::SimpleAsync:
            return 2.5 * static_cast<double>(p.expert_poll_max) + 60.0 * p.log2_n + 200.0;
        case ProtocolId::Sync:
            return static_cast<double>(p.sel_phase_len) +
                   static_cast<double>((p.m_levels + 1) * p.round_len) +
                   static_cast<double>(p.pull_interval) * (p.log2_n + 30.0) + 200.0;
        case ProtocolId::FullAsync:
            return 1.5 * static_cast<double>(p.t_aspirant) +
                   static_cast<double>((p.m_levels + 1) * p.expert_counter_max) +
                   static_cast<double>(p.candidate_expiry) +
                   static_cast<double>(p.pull_interval) * (p.log2_n + 30.0) + 200.0;
        case ProtocolId::Baseline3State:
            return 20.0 * p.log2_n;
    }
    return 0.0;
}

}  // namespace mcsim
