#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace shuffleval {

/// Ensemble summary of one metric: the estimate, its sample variance,
/// and the standard error of the estimate.
struct MetricSummary {
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
    std::uint64_t count = 0;
};

// Mean/variance/SE over per-trial values, reduced in index order.
MetricSummary summarize(std::span<const double> values);

struct MetricSeries {
    std::string name;
    MetricSummary summary;
};

/// Result of one seeded trial ensemble. Identical (config, seed) pairs
/// produce bit-identical outcomes regardless of worker count.
struct SimulationOutcome {
    std::uint64_t seed = 0;
    std::uint64_t trials = 0;
    std::vector<MetricSeries> metrics;

    bool has(const std::string& name) const;
    const MetricSummary& metric(const std::string& name) const;
    void add(std::string name, MetricSummary summary);
    void add_from_values(std::string name, std::span<const double> values);
};

}  // namespace shuffleval
