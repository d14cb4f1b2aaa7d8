#pragma once

#include <cstdint>

namespace shuffleval {

/// Binomial distribution over {0..trials} with success probability in [0,1].
struct BinomialSpec {
    std::int64_t trials = 0;
    double success_prob = 0.0;

    void validate() const;
};

/// Poisson distribution with non-negative mean.
struct PoissonSpec {
    double mean = 0.0;

    void validate() const;
};

struct GeometricRunStats {
    double mean = 0.0;
    double variance = 0.0;
};

// log C(n, k); requires 0 <= k <= n
double log_choose(std::int64_t n, std::int64_t k);

// Evaluated in log space; exact at the p = 0 and p = 1 boundaries.
// Throws std::domain_error if i is outside {0..trials}.
double binomial_pmf(const BinomialSpec& spec, std::int64_t i);

// Sum of pmf(i) for i in [lo, trials]. lo = 0 returns exactly 1,
// lo = trials + 1 returns exactly 0. Compensated summation.
double binomial_upper_tail(const BinomialSpec& spec, std::int64_t lo);

// Sum of pmf(i) for i in [0, hi]; hi < 0 returns 0. Summed directly
// (not via the complement) so small lower tails keep full precision.
double binomial_lower_tail(const BinomialSpec& spec, std::int64_t hi);

double poisson_pmf(const PoissonSpec& spec, std::int64_t i);

// Support bound used when a Poisson sum must be truncated: tail mass
// beyond mean + 10*sqrt(mean) + 20 is far below 1e-12 for means in scope.
std::int64_t poisson_truncation_bound(double mean);

// Outage-run moments for the geometric law q^s (1-q) on s >= 0:
// mean q/(1-q), variance q/(1-q)^2. Throws std::domain_error for q >= 1.
GeometricRunStats geometric_run_stats(double q);

// P(X <= hi) for X ~ Hypergeometric(population, marked, draws): the number
// of marked items in a uniform sample of `draws` without replacement.
double hypergeometric_lower_tail(std::int64_t population, std::int64_t marked,
                                 std::int64_t draws, std::int64_t hi);

}  // namespace shuffleval
