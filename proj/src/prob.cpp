#include "shuffleval/prob.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shuffleval {

namespace {

// Kahan-compensated accumulator.
struct Accum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

double log_binomial_pmf(std::int64_t n, double p, std::int64_t i) {
    return log_choose(n, i) + static_cast<double>(i) * std::log(p) +
           static_cast<double>(n - i) * std::log1p(-p);
}

}  // namespace

void BinomialSpec::validate() const {
    if (trials < 0) throw std::domain_error("BinomialSpec: trials must be non-negative");
    if (!(success_prob >= 0.0 && success_prob <= 1.0))
        throw std::domain_error("BinomialSpec: success_prob must be in [0,1]");
}

void PoissonSpec::validate() const {
    if (!(mean >= 0.0)) throw std::domain_error("PoissonSpec: mean must be non-negative");
}

double log_choose(std::int64_t n, std::int64_t k) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

double binomial_pmf(const BinomialSpec& spec, std::int64_t i) {
    spec.validate();
    if (i < 0 || i > spec.trials)
        throw std::domain_error("binomial_pmf: i outside {0.." + std::to_string(spec.trials) + "}");
    const double p = spec.success_prob;
    if (p == 0.0) return i == 0 ? 1.0 : 0.0;
    if (p == 1.0) return i == spec.trials ? 1.0 : 0.0;
    return std::exp(log_binomial_pmf(spec.trials, p, i));
}

double binomial_upper_tail(const BinomialSpec& spec, std::int64_t lo) {
    spec.validate();
    if (lo < 0 || lo > spec.trials + 1)
        throw std::domain_error("binomial_upper_tail: lo outside {0..trials+1}");
    if (lo == 0) return 1.0;
    if (lo == spec.trials + 1) return 0.0;
    const double p = spec.success_prob;
    if (p == 0.0) return 0.0;  // lo >= 1
    if (p == 1.0) return 1.0;  // lo <= trials
    Accum acc;
    for (std::int64_t i = spec.trials; i >= lo; --i)
        acc.add(std::exp(log_binomial_pmf(spec.trials, p, i)));
    return acc.sum < 1.0 ? acc.sum : 1.0;
}

double binomial_lower_tail(const BinomialSpec& spec, std::int64_t hi) {
    spec.validate();
    if (hi < 0) return 0.0;
    if (hi >= spec.trials) return 1.0;
    const double p = spec.success_prob;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;  // hi < trials
    Accum acc;
    for (std::int64_t i = 0; i <= hi; ++i)
        acc.add(std::exp(log_binomial_pmf(spec.trials, p, i)));
    return acc.sum < 1.0 ? acc.sum : 1.0;
}

double poisson_pmf(const PoissonSpec& spec, std::int64_t i) {
    spec.validate();
    if (i < 0) throw std::domain_error("poisson_pmf: i must be non-negative");
    if (spec.mean == 0.0) return i == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(i) * std::log(spec.mean) - spec.mean -
                    std::lgamma(static_cast<double>(i) + 1.0));
}

std::int64_t poisson_truncation_bound(double mean) {
    return static_cast<std::int64_t>(std::ceil(mean + 10.0 * std::sqrt(mean) + 20.0));
}

GeometricRunStats geometric_run_stats(double q) {
    if (!(q >= 0.0 && q < 1.0))
        throw std::domain_error("geometric_run_stats: q must be in [0,1)");
    const double r = 1.0 - q;
    return {q / r, q / (r * r)};
}

double hypergeometric_lower_tail(std::int64_t population, std::int64_t marked,
                                 std::int64_t draws, std::int64_t hi) {
    if (population < 0 || marked < 0 || marked > population || draws < 0 ||
        draws > population)
        throw std::domain_error("hypergeometric_lower_tail: invalid parameters");
    if (hi < 0) return 0.0;
    Accum acc;
    const std::int64_t i_lo = std::max<std::int64_t>(0, draws - (population - marked));
    const std::int64_t i_hi = std::min({hi, marked, draws});
    const double log_denom = log_choose(population, draws);
    for (std::int64_t i = i_lo; i <= i_hi; ++i)
        acc.add(std::exp(log_choose(marked, i) + log_choose(population - marked, draws - i) -
                         log_denom));
    return acc.sum < 1.0 ? acc.sum : 1.0;
}

}  // namespace shuffleval
