#include "shuffleval/params.hpp"

#include <stdexcept>
#include <string>

namespace shuffleval {

ServerSizeProfile SystemParams::size_profile() const {
    const std::int64_t n = total_clients();
    ServerSizeProfile prof;
    prof.floor_size = static_cast<int>(n / servers);
    prof.ceil_count = static_cast<int>(n % servers);
    prof.floor_count = servers - prof.ceil_count;
    return prof;
}

int SystemParams::exact_load() const {
    if (!divides_evenly())
        throw std::domain_error("SystemParams: (nominal+attackers) = " +
                                std::to_string(total_clients()) +
                                " is not divisible by servers = " + std::to_string(servers));
    return static_cast<int>(total_clients() / servers);
}

void SystemParams::validate() const {
    if (servers < 1) throw std::domain_error("SystemParams: servers must be >= 1");
    if (nominal < 0) throw std::domain_error("SystemParams: nominal must be >= 0");
    if (attackers < 0) throw std::domain_error("SystemParams: attackers must be >= 0");
    if (total_clients() < 1) throw std::domain_error("SystemParams: need at least one client");
    if (overload_threshold < 1)
        throw std::domain_error("SystemParams: overload_threshold must be >= 1");
    const ServerSizeProfile prof = size_profile();
    const int max_size = prof.ceil_count > 0 ? prof.floor_size + 1 : prof.floor_size;
    if (overload_threshold > max_size)
        throw std::domain_error("SystemParams: overload_threshold exceeds per-server load");
}

void ChurnParams::validate() const {
    if (nominal_arrival_rate < 0.0 || attacker_arrival_rate < 0.0)
        throw std::domain_error("ChurnParams: arrival rates must be non-negative");
    if (nominal_mean_lifetime <= 0.0 || attacker_mean_lifetime <= 0.0)
        throw std::domain_error("ChurnParams: mean lifetimes must be positive");
    if (arrival_model == ArrivalModel::kGaussianDeterministic &&
        (nominal_arrival_sd < 0.0 || attacker_arrival_sd < 0.0))
        throw std::domain_error("ChurnParams: arrival sd must be non-negative");
}

void ReputationConfig::validate() const {
    if (scheme == ReputationScheme::kAutoregressive &&
        !(ar_factor > 0.0 && ar_factor < 1.0))
        throw std::domain_error("ReputationConfig: ar_factor must be in (0,1)");
    if (!(confidence_multiplier > 0.0))
        throw std::domain_error("ReputationConfig: confidence_multiplier must be positive");
}

void QuarantineParams::validate() const {
    base.validate();
    if (hot_spares < 0) throw std::domain_error("QuarantineParams: hot_spares must be >= 0");
    if (stages < 1) throw std::domain_error("QuarantineParams: stages must be >= 1");
}

void MtdParams::validate() const {
    if (proxies < 1) throw std::domain_error("MtdParams: proxies must be >= 1");
    if (probe_rate < 0.0) throw std::domain_error("MtdParams: probe_rate must be >= 0");
    if (!(reset_rate > 0.0)) throw std::domain_error("MtdParams: reset_rate must be > 0");
}

}  // namespace shuffleval
