#pragma once

#include <optional>

#include "shuffleval/params.hpp"

namespace shuffleval {

struct PopulationSpread {
    double sigma_attackers = 0.0;
    double sigma_nominals = 0.0;
    // Relative spreads sigma/mean; empty when the class count is zero.
    std::optional<double> rel_attackers;
    std::optional<double> rel_nominals;
};

struct OneShuffleFreed {
    double value = 0.0;
    int skipped_terms = 0;  // infeasible summation terms (pool smaller than K)
};

// Probability that a server is overloaded (holds >= A attackers). When the
// load does not divide evenly the result mixes the two balanced server sizes.
double server_overload_prob(const SystemParams& params);

// Fraction of time a tagged nominal client sits in an overloaded server:
// the >= A tail over its v-1 server peers.
double nominal_exposure_prob(const SystemParams& params);

// Probability that a tagged attacker lands in a not-overloaded server:
// <= A-2 attackers among its v-1 peers. Zero for A = 1.
double attacker_cover_prob(const SystemParams& params);

// Probability a nominal client is in service at least `percent`% of S shuffles.
double in_service_prob(const SystemParams& params, int shuffles, double percent);

// Spread of the realized attacker/nominal totals around their means K and U.
PopulationSpread population_spread(const SystemParams& params);

// Playout-buffer priming rule: mean + 2 sd of the outage-run length,
// in shuffle periods. Requires exposure < 1.
double playout_buffer_requirement(const SystemParams& params);

// Poisson-population average of in_service_prob over (u, k), truncated at
// mean +- trunc_sigmas*sqrt(mean) + trunc_pad per class. Per-pair load is the
// nearest positive integer to (u+k)/M.
double churn_in_service_mixture(double mean_nominal, double mean_attackers, int servers,
                                int overload_threshold, int shuffles, double percent,
                                double trunc_sigmas = 10.0, double trunc_pad = 20.0);

// Shuffle count above which a client can be deemed nominal at the confidence
// implied by k_conf standard deviations (k_conf = 2 reproduces the 95% bound
// 16w(1-w)/(1-2w)^2). Empty when exposure >= 0.5 (no finite count works).
std::optional<double> nominal_shuffle_bound(const SystemParams& params, double k_conf);

// Analogous bound for deeming a client an attacker; empty when cover >= 0.5.
std::optional<double> attacker_shuffle_bound(const SystemParams& params, double k_conf);

// P(nominal reputation < 0 after S shuffles) = upper tail of binom(S, omega)
// at ceil(S/2).
double false_positive_rate(const SystemParams& params, int shuffles);

// P(attacker reputation > 0 after S shuffles) = upper tail of binom(S, beta).
double false_negative_rate(const SystemParams& params, int shuffles);

// Expected clients outside overloaded servers under a balanced placement:
// M * P(server not overloaded) * v. Requires (U+K) divisible by M.
// Argument order follows the L0(K, U, M) convention.
double expected_clean_clients(std::int64_t attackers, std::int64_t nominal, int servers,
                              int overload_threshold);

// Expected clients outside overloaded servers after one shuffle-detection
// round of the overloaded set (plus hot spares). The reassignment term uses
// the exact uniform-reassignment (hypergeometric) law per candidate count n
// of initially overloaded servers, weighted by binom(M, Omega).
OneShuffleFreed quarantine_one_shuffle_freed(const QuarantineParams& params);

}  // namespace shuffleval
