#pragma once

#include <vector>

#include <Eigen/Dense>

#include "shuffleval/params.hpp"

namespace shuffleval {

/// Stationary law of the reconnaissance chain over states 0..M
/// (number of proxy addresses known to the botnet).
struct StationaryDistribution {
    std::vector<double> probs;

    // Max |pi^T Q| entry; diagnostic for the balance equations.
    double balance_residual(const Eigen::MatrixXd& generator) const;
};

// (M+1)x(M+1) conservative rate matrix: q(n,n+1) per rate model,
// q(n,0) = delta for n >= 1, diagonal set so rows sum to zero.
Eigen::MatrixXd build_generator(const MtdParams& params);

// Solves pi^T Q = 0 with the normalization sum(pi) = 1 replacing one
// balance equation (dense LU). Throws std::runtime_error when the chain
// does not determine a unique distribution.
StationaryDistribution stationary_distribution(const Eigen::MatrixXd& generator);

// E V = sum i * pi_i.
double expected_known_proxies(const StationaryDistribution& dist);

// Constant-rate closed form E V = z (1 - (z/(z+1))^M).
double closed_form_expected_known(int proxies, double z);

struct UnknownProxiesPoint {
    double z = 0.0;
    double unknown = 0.0;  // M - E V
};

// One row per grid point; the constant model uses the closed form, the
// others a numeric stationary solve at beta = z * delta.
std::vector<UnknownProxiesPoint> unknown_proxies_curve(const MtdParams& params,
                                                       const std::vector<double>& z_grid);

}  // namespace shuffleval
