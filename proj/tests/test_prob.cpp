#include <cmath>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "shuffleval/prob.hpp"

using namespace shuffleval;

namespace {

// Naive direct evaluation for small trial counts: exact integer C(n,k)
// times plain powers, no logs.
double naive_binomial_pmf(int n, double p, int i) {
    double choose = 1.0;
    for (int j = 0; j < i; ++j) choose = choose * (n - j) / (j + 1);
    return choose * std::pow(p, i) * std::pow(1.0 - p, n - i);
}

}  // namespace

TEST_CASE("binomial pmf matches hand values") {
    CHECK(binomial_pmf({2, 0.0}, 0) == 1.0);
    CHECK(binomial_pmf({2, 0.0}, 1) == 0.0);
    CHECK(binomial_pmf({2, 0.5}, 1) == doctest::Approx(0.5).epsilon(1e-14));
    // (5/6)^10, reference value to 20 digits
    CHECK(binomial_pmf({10, 1.0 / 6.0}, 0) ==
          doctest::Approx(0.16150558288984572135).epsilon(1e-13));
    CHECK(binomial_pmf({5, 1.0}, 5) == 1.0);
    CHECK(binomial_pmf({5, 1.0}, 3) == 0.0);
    CHECK_THROWS_AS(binomial_pmf({5, 0.5}, 6), std::domain_error);
    CHECK_THROWS_AS(binomial_pmf({5, 0.5}, -1), std::domain_error);
    CHECK_THROWS_AS(binomial_pmf({5, 1.5}, 1), std::domain_error);
}

TEST_CASE("binomial pmf in log space matches naive evaluation up to trials 20") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = static_cast<int>(gen() % 21);
        const double p = unif(gen);
        const int i = n == 0 ? 0 : static_cast<int>(gen() % (n + 1));
        const double expected = naive_binomial_pmf(n, p, i);
        CHECK(binomial_pmf({n, p}, i) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("binomial pmf sums to one") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 1 + static_cast<int>(gen() % 400);
        const double p = unif(gen);
        double total = 0.0;
        for (int i = 0; i <= n; ++i) total += binomial_pmf({n, p}, i);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("binomial upper tail endpoints and examples") {
    CHECK(binomial_upper_tail({5, 0.3}, 0) == 1.0);
    CHECK(binomial_upper_tail({5, 0.3}, 6) == 0.0);
    CHECK(binomial_upper_tail({10, 1.0 / 6.0}, 1) ==
          doctest::Approx(0.83849441711015427865).epsilon(1e-13));
    CHECK_THROWS_AS(binomial_upper_tail({5, 0.3}, 7), std::domain_error);
}

TEST_CASE("tail complement, monotonicity in lo and p") {
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 1 + static_cast<int>(gen() % 200);
        const double p = unif(gen);
        const int lo = static_cast<int>(gen() % (n + 2));
        const BinomialSpec spec{n, p};
        const double upper = binomial_upper_tail(spec, lo);
        const double lower = binomial_lower_tail(spec, lo - 1);
        CHECK(upper + lower == doctest::Approx(1.0).epsilon(1e-12));
        if (lo <= n) CHECK(binomial_upper_tail(spec, lo + 1) <= upper + 1e-12);
        if (lo >= 1) {
            const double p2 = unif(gen);
            const double hi_p = std::max(p, p2), lo_p = std::min(p, p2);
            CHECK(binomial_upper_tail({n, hi_p}, lo) >=
                  binomial_upper_tail({n, lo_p}, lo) - 1e-12);
        }
    }
}

TEST_CASE("binomial pmf stays finite at large trial counts") {
    const double v = binomial_pmf({1000000, 0.5}, 500000);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("poisson pmf examples and truncated normalization") {
    CHECK(poisson_pmf({0.0}, 0) == 1.0);
    CHECK(poisson_pmf({0.0}, 3) == 0.0);
    CHECK(poisson_pmf({1.0}, 1) == doctest::Approx(0.3678794411714423216).epsilon(1e-13));
    // mean = 200 at the mode, reference value to 20 digits
    CHECK(poisson_pmf({200.0}, 200) ==
          doctest::Approx(0.028197727685920821799).epsilon(1e-12));
    CHECK_THROWS_AS(poisson_pmf({1.0}, -1), std::domain_error);
    CHECK_THROWS_AS(poisson_pmf({-1.0}, 0), std::domain_error);

    std::mt19937 gen(17);
    for (int rep = 0; rep < 200; ++rep) {
        const double mean = (gen() % 2000) / 2.0;
        const std::int64_t cap = poisson_truncation_bound(mean);
        double total = 0.0;
        for (std::int64_t i = 0; i <= cap; ++i) total += poisson_pmf({mean}, i);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("geometric outage stats") {
    const GeometricRunStats zero = geometric_run_stats(0.0);
    CHECK(zero.mean == 0.0);
    CHECK(zero.variance == 0.0);
    const GeometricRunStats half = geometric_run_stats(0.5);
    CHECK(half.mean == doctest::Approx(1.0));
    CHECK(half.variance == doctest::Approx(2.0));
    const GeometricRunStats point8 = geometric_run_stats(0.8);
    CHECK(point8.mean == doctest::Approx(4.0));
    CHECK(point8.variance == doctest::Approx(20.0).epsilon(1e-12));
    CHECK_THROWS_AS(geometric_run_stats(1.0), std::domain_error);
    CHECK_THROWS_AS(geometric_run_stats(-0.1), std::domain_error);
}

TEST_CASE("hypergeometric lower tail against direct enumeration") {
    // P(X <= 1) for population 10, marked 4, draws 3:
    // P(0) = C(6,3)/C(10,3) = 20/120, P(1) = C(4,1)C(6,2)/C(10,3) = 60/120
    CHECK(hypergeometric_lower_tail(10, 4, 3, 1) ==
          doctest::Approx(80.0 / 120.0).epsilon(1e-13));
    CHECK(hypergeometric_lower_tail(10, 4, 3, 3) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(hypergeometric_lower_tail(10, 4, 3, -1) == 0.0);
    // all marked: a draw of 3 always holds 3 marked
    CHECK(hypergeometric_lower_tail(5, 5, 3, 2) == 0.0);
    CHECK_THROWS_AS(hypergeometric_lower_tail(5, 6, 3, 1), std::domain_error);
}
