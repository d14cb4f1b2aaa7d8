#include "shuffleval/figures.hpp"

#include <cmath>
#include <limits>

#include "shuffleval/analytics.hpp"
#include "shuffleval/engine.hpp"
#include "shuffleval/mtd.hpp"

namespace shuffleval {

namespace {

constexpr std::uint64_t kDefaultSeed = 1;

std::uint64_t seed_of(const RunOverrides& o) { return o.seed.value_or(kDefaultSeed); }
std::uint64_t trials_of(const RunOverrides& o, std::uint64_t preset_default) {
    return o.trials.value_or(preset_default);
}

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> out;
    out.reserve(points);
    const double step = std::log(hi / lo) / (points - 1);
    for (int i = 0; i < points; ++i) out.push_back(lo * std::exp(step * i));
    return out;
}

ResultTable figure_in_service(const RunOverrides& o) {
    const std::uint64_t seed = seed_of(o);
    const std::uint64_t trials = trials_of(o, 10000);
    ResultTable table;
    table.sweep_columns = {"system.servers"};
    for (int m : {50, 60, 75, 100, 120, 150, 200, 240, 300}) {
        const SystemParams params{m, 1000, 200, 1};
        const std::vector<double> sweep = {static_cast<double>(m)};
        table.rows.push_back({"in_service_vs_servers", sweep, "in_service_analytic",
                              in_service_prob(params, 10, 50.0), std::nullopt, 0, seed});
        const SimulationOutcome sim =
            simulate_proactive(params, 10, 50.0, trials, seed,
                               PopulationRegime::kResampledEachRound, o.threads);
        const MetricSummary& s = sim.metric("in_service_prob");
        table.rows.push_back({"in_service_vs_servers", sweep, "in_service_simulated", s.mean,
                              s.std_error, trials, seed});
    }
    return table;
}

ResultTable figure_in_service_churn(const RunOverrides& o) {
    const std::uint64_t seed = seed_of(o);
    const std::uint64_t trials = trials_of(o, 200);
    ChurnParams churn;
    churn.arrival_model = ArrivalModel::kGaussianDeterministic;
    churn.nominal_arrival_rate = 100.0;
    churn.nominal_arrival_sd = 10.0;
    churn.nominal_mean_lifetime = 10.0;
    churn.attacker_arrival_rate = 2.0;
    churn.attacker_arrival_sd = 2.0;
    churn.attacker_mean_lifetime = 100.0;

    ResultTable table;
    table.sweep_columns = {"system.servers"};
    for (int m : {100, 120, 150}) {
        const SystemParams params{m, 1000, 200, 1};
        const std::vector<double> sweep = {static_cast<double>(m)};
        table.rows.push_back({"in_service_churn_vs_servers", sweep, "in_service_fixed_analytic",
                              in_service_prob(params, 10, 50.0), std::nullopt, 0, seed});
        const SimulationOutcome sim =
            simulate_churn(params, churn, 300, 400, 50.0, trials, seed, o.threads);
        const MetricSummary& s = sim.metric("in_service_prob");
        table.rows.push_back({"in_service_churn_vs_servers", sweep, "in_service_churn", s.mean,
                              s.std_error, trials, seed});
        const MetricSummary& k = sim.metric("mean_attackers");
        table.rows.push_back({"in_service_churn_vs_servers", sweep, "mean_attackers", k.mean,
                              k.std_error, trials, seed});
        const MetricSummary& u = sim.metric("mean_nominal");
        table.rows.push_back({"in_service_churn_vs_servers", sweep, "mean_nominal", u.mean,
                              u.std_error, trials, seed});
    }
    return table;
}

ResultTable figure_bounds(const char* id, bool nominal_side, const RunOverrides& o) {
    const std::uint64_t seed = seed_of(o);
    ResultTable table;
    table.sweep_columns = {"system.attackers", "system.overload_threshold"};
    const std::vector<int> thresholds = nominal_side ? std::vector<int>{1, 2, 3}
                                                     : std::vector<int>{2, 3};
    for (int a : thresholds) {
        for (int k = 10; k <= 300; k += 10) {
            const SystemParams params{100, 1000, k, a};
            const std::vector<double> sweep = {static_cast<double>(k), static_cast<double>(a)};
            const std::optional<double> bound =
                nominal_side ? nominal_shuffle_bound(params, 2.0)
                             : attacker_shuffle_bound(params, 2.0);
            table.rows.push_back({id, sweep,
                                  nominal_side ? "nominal_shuffle_bound" : "attacker_shuffle_bound",
                                  bound.value_or(std::numeric_limits<double>::infinity()),
                                  std::nullopt, 0, seed});
        }
    }
    return table;
}

ResultTable figure_error_rates(const char* id, bool false_positive, const RunOverrides& o) {
    const std::uint64_t seed = seed_of(o);
    const std::uint64_t trials = trials_of(o, 4000);
    const int a = false_positive ? 1 : 2;
    const std::vector<int> ks = false_positive ? std::vector<int>{50, 100, 150, 200, 300}
                                               : std::vector<int>{100, 150, 200, 300};
    ResultTable table;
    table.sweep_columns = {"system.attackers"};
    for (int k : ks) {
        const SystemParams params{100, 1000, k, a};
        const std::vector<double> sweep = {static_cast<double>(k)};
        const double analytic = false_positive ? false_positive_rate(params, 10)
                                               : false_negative_rate(params, 10);
        table.rows.push_back({id, sweep,
                              false_positive ? "fp_analytic" : "fn_analytic", analytic,
                              std::nullopt, 0, seed});
        const SimulationOutcome sim =
            simulate_reputation(params, 10, ReputationConfig{}, trials, seed,
                                PopulationRegime::kResampledEachRound, o.threads);
        const MetricSummary& s = sim.metric(false_positive ? "fp_rate" : "fn_rate");
        table.rows.push_back({id, sweep, false_positive ? "fp_simulated" : "fn_simulated",
                              s.mean, s.std_error, trials, seed});
    }
    return table;
}

ResultTable figure_quarantine_gain(const RunOverrides& o) {
    const std::uint64_t seed = seed_of(o);
    const std::uint64_t trials = trials_of(o, 2000);
    ResultTable table;
    table.sweep_columns = {"system.servers", "system.attackers"};
    for (int m : {50, 100, 200}) {
        for (int j : {1, 2, 4, 8}) {
            const int k = j * m;
            if (k > 800) continue;
            const SystemParams params{m, 1000, k, 1};
            const std::vector<double> sweep = {static_cast<double>(m), static_cast<double>(k)};
            const double l0 = expected_clean_clients(k, 1000, m, 1);
            const QuarantineParams q{params, 0, 1};
            const double freed = quarantine_one_shuffle_freed(q).value;
            table.rows.push_back(
                {"quarantine_gain", sweep, "stage0_clients", l0, std::nullopt, 0, seed});
            table.rows.push_back(
                {"quarantine_gain", sweep, "stage1_clients", freed, std::nullopt, 0, seed});
            table.rows.push_back({"quarantine_gain", sweep, "gain_fraction_of_nominals",
                                  (freed - l0) / 1000.0, std::nullopt, 0, seed});
            table.rows.push_back({"quarantine_gain", sweep, "gain_fraction_of_affected",
                                  (freed - l0) / (1000.0 - l0), std::nullopt, 0, seed});
            const SimulationOutcome sim = simulate_quarantine(q, trials, seed, o.threads);
            const MetricSummary& s = sim.metric("stage1_liberated_nominals");
            table.rows.push_back({"quarantine_gain", sweep, "stage1_simulated", s.mean,
                                  s.std_error, trials, seed});
        }
    }
    return table;
}

ResultTable figure_mtd(const char* id, MtdRateModel model, const RunOverrides& o) {
    const std::uint64_t seed = seed_of(o);
    MtdParams params;
    params.proxies = 50;
    params.rate_model = model;
    params.reset_rate = 1.0;
    ResultTable table;
    table.sweep_columns = {"z"};
    for (const auto& point : unknown_proxies_curve(params, log_grid(0.01, 100.0, 25)))
        table.rows.push_back(
            {id, {point.z}, "unknown_proxies", point.unknown, std::nullopt, 0, seed});
    return table;
}

}  // namespace

const std::vector<FigurePreset>& figure_presets() {
    static const std::vector<FigurePreset> presets = {
        {"in_service_vs_servers",
         "P(in-service >= 50% of S=10 shuffles) vs M; U=1000, K=200, A=1; analytic + simulated"},
        {"in_service_churn_vs_servers",
         "50% in-service likelihood under client churn vs M; Gaussian arrivals (2 sd 2 / 100 sd "
         "10), deterministic lifetimes (100 / 10), A=1"},
        {"reputation_bound_nominal",
         "Shuffles needed to deem a client nominal at 95% confidence; U=1000, M=100, K sweep, "
         "A in {1,2,3}"},
        {"reputation_bound_attacker",
         "Shuffles needed to deem a client an attacker at 95% confidence; U=1000, M=100, K "
         "sweep, A in {2,3}"},
        {"false_positive_vs_attackers",
         "False-positive rate after 10 shuffles vs K; M=100, U=1000, A=1; analytic + simulated"},
        {"false_negative_vs_attackers",
         "False-negative rate after 10 shuffles vs K; M=100, U=1000, A=2; analytic + simulated"},
        {"quarantine_gain",
         "Clean clients before/after one quarantine shuffle and the liberated-fraction gain; "
         "U=1000, A=1, M in {50,100,200}, K multiples of M"},
        {"mtd_unknown_constant",
         "Steady-state proxies unknown to the botnet vs z, constant discovery rate, M=50"},
        {"mtd_unknown_linear",
         "Steady-state proxies unknown to the botnet vs z, discovery rate beta*(M-n), M=50"},
    };
    return presets;
}

ResultTable run_figure(const std::string& name, const RunOverrides& overrides) {
    if (name == "in_service_vs_servers") return figure_in_service(overrides);
    if (name == "in_service_churn_vs_servers") return figure_in_service_churn(overrides);
    if (name == "reputation_bound_nominal")
        return figure_bounds("reputation_bound_nominal", true, overrides);
    if (name == "reputation_bound_attacker")
        return figure_bounds("reputation_bound_attacker", false, overrides);
    if (name == "false_positive_vs_attackers")
        return figure_error_rates("false_positive_vs_attackers", true, overrides);
    if (name == "false_negative_vs_attackers")
        return figure_error_rates("false_negative_vs_attackers", false, overrides);
    if (name == "quarantine_gain") return figure_quarantine_gain(overrides);
    if (name == "mtd_unknown_constant")
        return figure_mtd("mtd_unknown_constant", MtdRateModel::kConstant, overrides);
    if (name == "mtd_unknown_linear")
        return figure_mtd("mtd_unknown_linear", MtdRateModel::kLinearRemaining, overrides);

    std::string message = "unknown figure preset '" + name + "'; valid presets:";
    for (const auto& preset : figure_presets()) message += " " + preset.name;
    throw ScenarioError(message);
}

}  // namespace shuffleval
