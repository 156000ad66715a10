#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mcsim/rng.hpp"

namespace mcsim {

// Majority bit of a nonempty bit multiset; draws resolve to 0.
inline int majority_of_bits(const std::vector<int>& bits) {
    if (bits.empty()) throw std::invalid_argument("majority of empty multiset");
    std::size_t ones = 0;
    for (int b : bits) ones += (b != 0);
    return 2 * ones > bits.size() ? 1 : 0;
}

// A problem instance: n nodes, an initial bit per node, and the majority bit.
// The majority fraction is realized exactly (round(p*n) nodes carry the
// majority bit); positions are shuffled by the seed.
struct Instance {
    std::uint64_t n = 0;
    std::vector<std::uint8_t> initial_bits;
    int majority_bit = 0;
    double advantage_fraction = 0.0;  // realized p
};

inline Instance make_instance(std::uint64_t n, double p, std::uint64_t seed, int majority_bit = 0) {
    if (n < 16) throw std::invalid_argument("n must be at least 16");
    if (!(p >= 0.5 && p <= 1.0)) throw std::invalid_argument("p must be in [1/2, 1]");
    if (majority_bit != 0 && majority_bit != 1) throw std::invalid_argument("majority bit must be 0 or 1");

    const auto majority_count = static_cast<std::uint64_t>(std::llround(p * static_cast<double>(n)));
    if (majority_count * 2 < n)
        throw std::invalid_argument("p rounds below one half");
    if (majority_bit == 1 && majority_count * 2 == n)
        throw std::invalid_argument("a draw resolves the majority to 0, not 1");

    Instance inst;
    inst.n = n;
    inst.majority_bit = majority_bit;
    inst.advantage_fraction = static_cast<double>(majority_count) / static_cast<double>(n);
    inst.initial_bits.assign(n, static_cast<std::uint8_t>(1 - majority_bit));
    for (std::uint64_t i = 0; i < majority_count; ++i)
        inst.initial_bits[i] = static_cast<std::uint8_t>(majority_bit);

    Rng rng(hash_combine(seed, 0x696e7374ull));
    for (std::uint64_t i = n - 1; i > 0; --i) {
        std::uint64_t j = rng.bounded(i + 1);
        std::swap(inst.initial_bits[i], inst.initial_bits[j]);
    }
    return inst;
}

}  // namespace mcsim
