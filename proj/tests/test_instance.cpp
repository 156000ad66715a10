#include <doctest.h>

#include <algorithm>

#include "mcsim/instance.hpp"

using namespace mcsim;

TEST_CASE("majority of a bit multiset, draws resolve to 0") {
    CHECK(majority_of_bits({0, 1, 1}) == 1);
    CHECK(majority_of_bits({0, 1}) == 0);
    CHECK(majority_of_bits({1, 1, 0}) == 1);
    CHECK_THROWS_AS(majority_of_bits({}), std::invalid_argument);
}

TEST_CASE("instance realizes the majority fraction exactly") {
    auto inst = make_instance(100, 0.7, 42);
    std::size_t maj = std::count(inst.initial_bits.begin(), inst.initial_bits.end(),
                                 static_cast<std::uint8_t>(inst.majority_bit));
    CHECK(maj == 70);
    CHECK(inst.advantage_fraction == doctest::Approx(0.7));
}

TEST_CASE("a draw keeps majority bit 0") {
    auto inst = make_instance(100, 0.5, 7);
    CHECK(inst.majority_bit == 0);
    CHECK_THROWS_AS(make_instance(100, 0.5, 7, 1), std::invalid_argument);
}

TEST_CASE("seeds permute the same multiset") {
    auto a = make_instance(16, 0.75, 1);
    auto b = make_instance(16, 0.75, 2);
    auto ca = std::count(a.initial_bits.begin(), a.initial_bits.end(), std::uint8_t{0});
    auto cb = std::count(b.initial_bits.begin(), b.initial_bits.end(), std::uint8_t{0});
    CHECK(ca == cb);
    CHECK(ca == 12);
    CHECK(a.initial_bits != b.initial_bits);  // different permutations for these seeds
    CHECK(make_instance(16, 0.75, 1).initial_bits == a.initial_bits);
}

TEST_CASE("majority bit 1 instances flip the roles") {
    auto inst = make_instance(64, 0.75, 3, 1);
    std::size_t ones = std::count(inst.initial_bits.begin(), inst.initial_bits.end(), std::uint8_t{1});
    CHECK(ones == 48);
    CHECK(inst.majority_bit == 1);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(make_instance(8, 0.7, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_instance(64, 0.4, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_instance(64, 1.1, 1), std::invalid_argument);
}
