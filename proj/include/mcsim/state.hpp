#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

namespace mcsim {

// A node state is a short tuple of small integers. f[0] is the type tag,
// remaining slots are protocol-defined fields; unused slots stay 0 so that
// equality and hashing work on the whole array.
struct State {
    std::array<std::int32_t, 9> f{};

    std::int32_t tag() const { return f[0]; }
    std::int32_t& operator[](std::size_t i) { return f[i]; }
    std::int32_t operator[](std::size_t i) const { return f[i]; }

    friend bool operator==(const State&, const State&) = default;
    friend auto operator<=>(const State&, const State&) = default;
};

// Convenience constructor: make_state(4, b) == (4, b, 0, 0, ...).
template <typename... Ts>
State make_state(Ts... vals) {
    static_assert(sizeof...(Ts) <= 9);
    State s;
    std::size_t i = 0;
    ((s.f[i++] = static_cast<std::int32_t>(vals)), ...);
    return s;
}

struct StateHash {
    std::size_t operator()(const State& s) const {
        // FNV-1a over the 9 fields, then a final mix.
        std::uint64_t h = 1469598103934665603ull;
        for (std::int32_t v : s.f) {
            h ^= static_cast<std::uint32_t>(v);
            h *= 1099511628211ull;
        }
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
        return static_cast<std::size_t>(h);
    }
};

inline std::string to_string(const State& s) {
    std::ostringstream os;
    os << '(';
    int last = 8;
    while (last > 0 && s.f[last] == 0) --last;
    for (int i = 0; i <= last; ++i) {
        if (i) os << ',';
        os << s.f[i];
    }
    os << ')';
    return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const State& s) {
    return os << to_string(s);
}

using StatePair = std::pair<State, State>;

}  // namespace mcsim
