#include "shuffleval/outcome.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace shuffleval {

MetricSummary summarize(std::span<const double> values) {
    MetricSummary out;
    out.count = values.size();
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) {
            const double d = v - out.mean;
            sq += d * d;
        }
        out.variance = sq / static_cast<double>(values.size() - 1);
        out.std_error = std::sqrt(out.variance / static_cast<double>(values.size()));
    }
    return out;
}

bool SimulationOutcome::has(const std::string& name) const {
    for (const auto& m : metrics)
        if (m.name == name) return true;
    return false;
}

const MetricSummary& SimulationOutcome::metric(const std::string& name) const {
    for (const auto& m : metrics)
        if (m.name == name) return m.summary;
    throw std::out_of_range("SimulationOutcome: no metric named '" + name + "'");
}

void SimulationOutcome::add(std::string name, MetricSummary summary) {
    metrics.push_back({std::move(name), summary});
}

void SimulationOutcome::add_from_values(std::string name, std::span<const double> values) {
    add(std::move(name), summarize(values));
}

}  // namespace shuffleval
