#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "shuffleval/rng.hpp"

using namespace shuffleval;

TEST_CASE("splitmix64 reference sequence") {
    SplitMix64 sm{0};
    CHECK(sm.next() == 0xe220a8397b1dcdafull);
    CHECK(sm.next() == 0x6e789e6aa1b965f4ull);
    CHECK(sm.next() == 0x06c45d188009454full);
    SplitMix64 sm42{42};
    CHECK(sm42.next() == 0xbdd732262feb6e95ull);
    CHECK(sm42.next() == 0x28efe333b266f103ull);
}

TEST_CASE("xoshiro256++ reference sequence from splitmix seeding") {
    Xoshiro256pp x(42);
    CHECK(x.next() == 0xd0764d4f4476689full);
    CHECK(x.next() == 0x519e4174576f3791ull);
    CHECK(x.next() == 0xfbe07cfb0c24ed8cull);
    CHECK(x.next() == 0xb37d9f600cd835b8ull);
    CHECK(x.next() == 0xcb231c3874846a73ull);
}

TEST_CASE("trial seeds are order-free and distinct") {
    const std::uint64_t a = trial_seed(99, 0);
    const std::uint64_t b = trial_seed(99, 1);
    CHECK(a != b);
    CHECK(trial_seed(99, 0) == a);
    CHECK(trial_seed(100, 0) != a);
}

TEST_CASE("bounded draws are in range and roughly uniform") {
    Rng rng(1234);
    std::vector<int> hist(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const std::uint64_t v = rng.below(10);
        REQUIRE(v < 10);
        ++hist[v];
    }
    for (int count : hist) {
        CHECK(count > draws / 10 - 600);
        CHECK(count < draws / 10 + 600);
    }
}

TEST_CASE("normal and poisson sample moments") {
    Rng rng(77);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = rng.normal(2.0, 3.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.02));
    CHECK(var == doctest::Approx(9.0).epsilon(0.03));

    double psum = 0.0, psq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = static_cast<double>(rng.poisson(7.5));
        psum += v;
        psq += v * v;
    }
    const double pmean = psum / n;
    CHECK(pmean == doctest::Approx(7.5).epsilon(0.01));
    CHECK(psq / n - pmean * pmean == doctest::Approx(7.5).epsilon(0.05));
}

TEST_CASE("geometric lifetimes have the configured mean") {
    Rng rng(5150);
    const int n = 200000;
    double sum = 0.0;
    std::int64_t min_seen = 1 << 30;
    for (int i = 0; i < n; ++i) {
        const std::int64_t v = rng.geometric_lifetime(10.0);
        sum += static_cast<double>(v);
        min_seen = std::min(min_seen, v);
    }
    CHECK(min_seen >= 1);
    CHECK(sum / n == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("shuffle produces a permutation") {
    Rng rng(3);
    std::vector<int> items(100);
    std::iota(items.begin(), items.end(), 0);
    rng.shuffle(std::span<int>(items));
    std::vector<int> sorted = items;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 100; ++i) CHECK(sorted[i] == i);
}
