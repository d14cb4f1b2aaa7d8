#include "shuffleval/mtd.hpp"

#include <cmath>
#include <stdexcept>

namespace shuffleval {

double StationaryDistribution::balance_residual(const Eigen::MatrixXd& generator) const {
    Eigen::Map<const Eigen::VectorXd> pi(probs.data(), static_cast<Eigen::Index>(probs.size()));
    return (pi.transpose() * generator).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd build_generator(const MtdParams& params) {
    params.validate();
    const int m = params.proxies;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (int n = 0; n < m; ++n) {
        double up = params.probe_rate;
        switch (params.rate_model) {
            case MtdRateModel::kConstant: break;
            case MtdRateModel::kLinearRemaining: up *= static_cast<double>(m - n); break;
            case MtdRateModel::kLinearRemainingNormalized:
                up *= static_cast<double>(m - n) / static_cast<double>(m);
                break;
        }
        q(n, n + 1) = up;
    }
    for (int n = 1; n <= m; ++n) q(n, 0) = params.reset_rate;
    for (int n = 0; n <= m; ++n) q(n, n) = -(q.row(n).sum() - q(n, n));
    return q;
}

StationaryDistribution stationary_distribution(const Eigen::MatrixXd& generator) {
    const Eigen::Index dim = generator.rows();
    if (dim < 1 || generator.cols() != dim)
        throw std::runtime_error("stationary_distribution: generator must be square");

    // Solve Q^T pi = 0 with the last balance equation replaced by sum(pi) = 1.
    Eigen::MatrixXd a = generator.transpose();
    a.row(dim - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
    b(dim - 1) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw std::runtime_error(
            "stationary_distribution: chain has no unique stationary distribution");
    Eigen::VectorXd pi = lu.solve(b);

    StationaryDistribution dist;
    dist.probs.assign(pi.data(), pi.data() + dim);
    for (double& v : dist.probs)
        if (v < 0.0 && v > -1e-12) v = 0.0;  // clip solver noise
    return dist;
}

double expected_known_proxies(const StationaryDistribution& dist) {
    double ev = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i)
        ev += static_cast<double>(i) * dist.probs[i];
    return ev;
}

double closed_form_expected_known(int proxies, double z) {
    if (proxies < 1) throw std::domain_error("closed_form_expected_known: proxies must be >= 1");
    if (z < 0.0) throw std::domain_error("closed_form_expected_known: z must be >= 0");
    if (z == 0.0) return 0.0;
    // z (1 - (z/(z+1))^M), computed via log1p/expm1 so huge z stays accurate.
    const double log_ratio = -std::log1p(1.0 / z);
    return z * -std::expm1(static_cast<double>(proxies) * log_ratio);
}

std::vector<UnknownProxiesPoint> unknown_proxies_curve(const MtdParams& params,
                                                       const std::vector<double>& z_grid) {
    params.validate();
    if (z_grid.empty()) throw std::domain_error("unknown_proxies_curve: empty z grid");
    std::vector<UnknownProxiesPoint> out;
    out.reserve(z_grid.size());
    const double m = static_cast<double>(params.proxies);
    for (double z : z_grid) {
        double ev = 0.0;
        if (params.rate_model == MtdRateModel::kConstant) {
            ev = closed_form_expected_known(params.proxies, z);
        } else {
            MtdParams at_z = params;
            at_z.probe_rate = z * params.reset_rate;
            ev = expected_known_proxies(stationary_distribution(build_generator(at_z)));
        }
        out.push_back({z, m - ev});
    }
    return out;
}

}  // namespace shuffleval
