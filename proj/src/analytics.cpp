#include "shuffleval/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shuffleval/prob.hpp"

namespace shuffleval {

namespace {

// Mixture over the two balanced server sizes, weighting each size class by
// the chance a tagged client lands there (proportional to held clients).
template <typename TailFn>
double client_weighted_mix(const SystemParams& params, TailFn&& tail_of_size) {
    const ServerSizeProfile prof = params.size_profile();
    const double n = static_cast<double>(params.total_clients());
    double out = 0.0;
    if (prof.floor_count > 0 && prof.floor_size > 0)
        out += (static_cast<double>(prof.floor_size) * prof.floor_count / n) *
               tail_of_size(prof.floor_size);
    if (prof.ceil_count > 0)
        out += (static_cast<double>(prof.floor_size + 1) * prof.ceil_count / n) *
               tail_of_size(prof.floor_size + 1);
    return out;
}

std::int64_t required_rounds(int shuffles, double percent) {
    return static_cast<std::int64_t>(
        std::ceil(static_cast<double>(shuffles) * percent / 100.0));
}

double in_service_tail(double omega, int shuffles, double percent) {
    const std::int64_t k_min = required_rounds(shuffles, percent);
    return binomial_upper_tail({shuffles, 1.0 - omega}, std::min<std::int64_t>(k_min, shuffles + 1));
}

// Expected clients in not-overloaded servers after `pool_clients` clients
// (containing `pool_attackers` attackers) are uniformly reassigned to
// `servers` balanced servers.
double expected_unattacked_after_reassign(std::int64_t pool_clients,
                                          std::int64_t pool_attackers, int servers,
                                          int overload_threshold) {
    if (pool_clients <= 0 || servers <= 0) return 0.0;
    const std::int64_t floor_size = pool_clients / servers;
    const int ceil_count = static_cast<int>(pool_clients % servers);
    const int floor_count = servers - ceil_count;
    double out = 0.0;
    auto add = [&](std::int64_t size, int count) {
        if (count == 0 || size == 0) return;
        const double not_ov = hypergeometric_lower_tail(pool_clients, pool_attackers, size,
                                                        overload_threshold - 1);
        out += static_cast<double>(count) * static_cast<double>(size) * not_ov;
    };
    add(floor_size, floor_count);
    add(floor_size + 1, ceil_count);
    return out;
}

}  // namespace

double server_overload_prob(const SystemParams& params) {
    params.validate();
    const double p = params.attacker_fraction();
    const int a = params.overload_threshold;
    const ServerSizeProfile prof = params.size_profile();
    const double m = static_cast<double>(params.servers);
    double out = 0.0;
    if (prof.floor_count > 0)
        out += (prof.floor_count / m) * binomial_upper_tail({prof.floor_size, p},
                                                            std::min<std::int64_t>(a, prof.floor_size + 1));
    if (prof.ceil_count > 0)
        out += (prof.ceil_count / m) *
               binomial_upper_tail({prof.floor_size + 1, p}, a);
    return out;
}

double nominal_exposure_prob(const SystemParams& params) {
    params.validate();
    const double p = params.attacker_fraction();
    const int a = params.overload_threshold;
    return client_weighted_mix(params, [&](int size) {
        return binomial_upper_tail({size - 1, p}, std::min<std::int64_t>(a, size));
    });
}

double attacker_cover_prob(const SystemParams& params) {
    params.validate();
    if (params.overload_threshold == 1) return 0.0;  // empty summation
    const double p = params.attacker_fraction();
    const int a = params.overload_threshold;
    return client_weighted_mix(params, [&](int size) {
        return binomial_lower_tail({size - 1, p}, a - 2);
    });
}

double in_service_prob(const SystemParams& params, int shuffles, double percent) {
    if (shuffles < 1) throw std::domain_error("in_service_prob: shuffles must be >= 1");
    if (!(percent >= 0.0 && percent <= 100.0))
        throw std::domain_error("in_service_prob: percent must be in [0,100]");
    return in_service_tail(nominal_exposure_prob(params), shuffles, percent);
}

PopulationSpread population_spread(const SystemParams& params) {
    params.validate();
    const double n = static_cast<double>(params.total_clients());
    const double p = params.attacker_fraction();
    const double sigma = std::sqrt(n * p * (1.0 - p));
    PopulationSpread out;
    out.sigma_attackers = sigma;
    out.sigma_nominals = sigma;
    if (params.attackers > 0)
        out.rel_attackers = std::sqrt(static_cast<double>(params.nominal) /
                                      (static_cast<double>(params.attackers) * n));
    if (params.nominal > 0)
        out.rel_nominals = std::sqrt(static_cast<double>(params.attackers) /
                                     (static_cast<double>(params.nominal) * n));
    return out;
}

double playout_buffer_requirement(const SystemParams& params) {
    const double omega = nominal_exposure_prob(params);
    if (omega >= 1.0)
        throw std::domain_error("playout_buffer_requirement: exposure is 1 (permanent outage)");
    const GeometricRunStats stats = geometric_run_stats(omega);
    return stats.mean + 2.0 * std::sqrt(stats.variance);
}

double churn_in_service_mixture(double mean_nominal, double mean_attackers, int servers,
                                int overload_threshold, int shuffles, double percent,
                                double trunc_sigmas, double trunc_pad) {
    if (mean_nominal < 0.0 || mean_attackers < 0.0)
        throw std::domain_error("churn_in_service_mixture: means must be non-negative");
    if (servers < 1) throw std::domain_error("churn_in_service_mixture: servers must be >= 1");
    if (shuffles < 1) throw std::domain_error("churn_in_service_mixture: shuffles must be >= 1");

    auto window = [&](double mean) -> std::pair<std::int64_t, std::int64_t> {
        const double w = trunc_sigmas * std::sqrt(mean) + trunc_pad;
        const auto lo = static_cast<std::int64_t>(std::max(0.0, std::floor(mean - w)));
        const auto hi = static_cast<std::int64_t>(std::ceil(mean + w));
        return {lo, hi};
    };
    const auto [u_lo, u_hi] = window(mean_nominal);
    const auto [k_lo, k_hi] = window(mean_attackers);
    const PoissonSpec pu{mean_nominal};
    const PoissonSpec pk{mean_attackers};

    double total = 0.0;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double wk = poisson_pmf(pk, k);
        if (wk == 0.0) continue;
        for (std::int64_t u = u_lo; u <= u_hi; ++u) {
            const double w = wk * poisson_pmf(pu, u);
            if (w == 0.0) continue;
            double value = 1.0;
            if (k > 0 && u > 0) {
                const double p =
                    static_cast<double>(k) / static_cast<double>(u + k);
                const auto load = std::max<std::int64_t>(
                    1, std::llround(static_cast<double>(u + k) / servers));
                const int peers = static_cast<int>(load) - 1;
                const double omega = binomial_upper_tail(
                    {peers, p}, std::min<std::int64_t>(overload_threshold, peers + 1));
                value = in_service_tail(omega, shuffles, percent);
            }
            total += w * value;
        }
    }
    return total;
}

namespace {

std::optional<double> shuffle_bound(double q, double k_conf) {
    if (q >= 0.5) return std::nullopt;
    const double margin = 1.0 - 2.0 * q;
    return 4.0 * k_conf * k_conf * q * (1.0 - q) / (margin * margin);
}

}  // namespace

std::optional<double> nominal_shuffle_bound(const SystemParams& params, double k_conf) {
    return shuffle_bound(nominal_exposure_prob(params), k_conf);
}

std::optional<double> attacker_shuffle_bound(const SystemParams& params, double k_conf) {
    return shuffle_bound(attacker_cover_prob(params), k_conf);
}

double false_positive_rate(const SystemParams& params, int shuffles) {
    if (shuffles < 1) throw std::domain_error("false_positive_rate: shuffles must be >= 1");
    const double omega = nominal_exposure_prob(params);
    return binomial_upper_tail({shuffles, omega}, (shuffles + 1) / 2);
}

double false_negative_rate(const SystemParams& params, int shuffles) {
    if (shuffles < 1) throw std::domain_error("false_negative_rate: shuffles must be >= 1");
    const double beta = attacker_cover_prob(params);
    return binomial_upper_tail({shuffles, beta}, (shuffles + 1) / 2);
}

double expected_clean_clients(std::int64_t attackers, std::int64_t nominal, int servers,
                              int overload_threshold) {
    const SystemParams params{servers, nominal, attackers, overload_threshold};
    params.validate();
    const int load = params.exact_load();
    const double not_ov = binomial_lower_tail({load, params.attacker_fraction()},
                                              overload_threshold - 1);
    return static_cast<double>(servers) * not_ov * load;
}

OneShuffleFreed quarantine_one_shuffle_freed(const QuarantineParams& params) {
    params.validate();
    const SystemParams& base = params.base;
    const int load = base.exact_load();
    const std::int64_t attackers = base.attackers;
    const double p = base.attacker_fraction();
    const int a = base.overload_threshold;

    OneShuffleFreed out;
    out.value = expected_clean_clients(attackers, base.nominal, base.servers, a);
    if (attackers == 0) return out;

    const double overload = binomial_upper_tail({load, p}, a);
    const BinomialSpec q1{base.servers, overload};
    const auto n_lo = std::max<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(base.servers * p)),
        (attackers + load - 1) / load);
    const std::int64_t n_hi = std::min<std::int64_t>(base.servers, attackers);
    for (std::int64_t n = std::max<std::int64_t>(n_lo, 1); n <= n_hi; ++n) {
        const std::int64_t pool = static_cast<std::int64_t>(load) * n;
        if (pool < attackers) {
            ++out.skipped_terms;
            continue;
        }
        const double weight = binomial_pmf(q1, n);
        out.value += weight * expected_unattacked_after_reassign(
                                  pool, attackers, static_cast<int>(n) + params.hot_spares, a);
    }
    return out;
}

}  // namespace shuffleval
