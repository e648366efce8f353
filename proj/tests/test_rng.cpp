#include <catch2/catch_amalgamated.hpp>

#include "forage/rng.hpp"

using namespace forage;

TEST_CASE("same seed gives the same stream") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("below stays in range and covers it") {
    Rng rng(7);
    std::array<int, 10> hits{};
    for (int i = 0; i < 10000; ++i) {
        auto v = rng.below(10);
        REQUIRE(v < 10);
        hits[static_cast<std::size_t>(v)]++;
    }
    for (int h : hits) CHECK(h > 800); // roughly uniform
}

TEST_CASE("real is in [0,1)") {
    Rng rng(9);
    for (int i = 0; i < 10000; ++i) {
        double u = rng.real();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("int_in is inclusive on both ends") {
    Rng rng(11);
    bool lo = false, hi = false;
    for (int i = 0; i < 1000; ++i) {
        int v = rng.int_in(3, 5);
        REQUIRE(v >= 3);
        REQUIRE(v <= 5);
        lo |= (v == 3);
        hi |= (v == 5);
    }
    CHECK(lo);
    CHECK(hi);
}

TEST_CASE("derive separates streams") {
    CHECK(Rng::derive(1, 2, 3) != Rng::derive(1, 2, 4));
    CHECK(Rng::derive(1, 2, 3) != Rng::derive(1, 3, 3));
    CHECK(Rng::derive(1, 2, 3) != Rng::derive(2, 2, 3));
    CHECK(Rng::derive(1, 2, 3) == Rng::derive(1, 2, 3));
}

TEST_CASE("state save/load round-trips") {
    Rng a(123);
    for (int i = 0; i < 17; ++i) a.next_u64();
    std::string state = a.save_state();
    Rng b(0);
    b.load_state(state);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}
