#pragma once

#include <cstdint>

namespace shuffleval {

/// Per-server client-count layout of a balanced placement: `ceil_count`
/// servers hold `floor_size + 1` clients, the rest hold `floor_size`.
struct ServerSizeProfile {
    int floor_size = 0;
    int floor_count = 0;
    int ceil_count = 0;

    bool exact() const { return ceil_count == 0; }
};

/// Population model: M servers, mean nominal/attacker client counts, and the
/// number of co-assigned attackers that overloads one server.
struct SystemParams {
    int servers = 1;
    std::int64_t nominal = 0;
    std::int64_t attackers = 0;
    int overload_threshold = 1;

    std::int64_t total_clients() const { return nominal + attackers; }
    double attacker_fraction() const {
        return static_cast<double>(attackers) / static_cast<double>(total_clients());
    }
    ServerSizeProfile size_profile() const;
    bool divides_evenly() const { return total_clients() % servers == 0; }

    // Per-server load (U+K)/M; throws if the division is not exact.
    int exact_load() const;

    void validate() const;
};

enum class ArrivalModel { kPoissonExponential, kGaussianDeterministic };

/// Arrival/lifetime description of client turnover, rates per shuffle period.
struct ChurnParams {
    double nominal_arrival_rate = 0.0;
    double attacker_arrival_rate = 0.0;
    double nominal_mean_lifetime = 1.0;
    double attacker_mean_lifetime = 1.0;
    ArrivalModel arrival_model = ArrivalModel::kGaussianDeterministic;
    double nominal_arrival_sd = 0.0;   // gaussian model only
    double attacker_arrival_sd = 0.0;  // gaussian model only

    void validate() const;
};

enum class ReputationScheme { kUnitIncrement, kAutoregressive };

struct ReputationConfig {
    ReputationScheme scheme = ReputationScheme::kUnitIncrement;
    double ar_factor = 0.9;               // autoregressive only, in (0,1)
    double confidence_multiplier = 2.0;   // 2 => 95%, 3 => 99%

    void validate() const;
};

struct QuarantineParams {
    SystemParams base;
    int hot_spares = 0;
    int stages = 1;

    void validate() const;
};

enum class MtdRateModel { kConstant, kLinearRemaining, kLinearRemainingNormalized };

/// Botnet-reconnaissance CTMC rates: discovery rate beta (shape per
/// rate_model) and address-reset rate delta.
struct MtdParams {
    int proxies = 1;
    double probe_rate = 0.0;   // beta
    double reset_rate = 1.0;   // delta
    MtdRateModel rate_model = MtdRateModel::kConstant;

    double z() const { return probe_rate / reset_rate; }
    double x() const { return probe_rate / (probe_rate + reset_rate); }

    void validate() const;
};

}  // namespace shuffleval
