#pragma once

#include <cstdint>
#include <vector>

#include "shuffleval/outcome.hpp"
#include "shuffleval/params.hpp"
#include "shuffleval/rng.hpp"

namespace shuffleval {

enum class ClientClass : std::uint8_t { kNominal, kAttacker };
enum class ServerRole : std::uint8_t { kActive, kHotSpare, kQuarantine, kIdle };

struct ClientRecord {
    std::uint32_t id = 0;
    ClientClass cls = ClientClass::kNominal;
    double reputation = 0.0;
    std::int32_t server = -1;
    std::int32_t remaining_lifetime = 0;  // churn runs only
};

struct ServerState {
    std::int32_t id = 0;
    std::vector<std::uint32_t> clients;
    ServerRole role = ServerRole::kActive;
    bool overloaded = false;
};

/// How trial worlds evolve between shuffle rounds.
///   kPersistent: client classes are drawn once per trial; every round is a
///     pure permutation of that population (the operational procedure).
///   kResampledEachRound: the non-tagged population is redrawn each round,
///     realizing the model's independent-round regime exactly. Used when a
///     run cross-validates a closed form whose derivation assumes it.
enum class PopulationRegime { kPersistent, kResampledEachRound };

// Uniformly random balanced placement: every active server ends with
// floor(N/M) or floor(N/M)+1 clients (remainder round-robin over server
// order). Rebuilds server membership lists and client server fields.
void assign_uniform(std::vector<ClientRecord>& clients, std::vector<ServerState>& servers,
                    Rng& rng);

// Exact detection oracle: a server is overloaded iff it holds at least
// `overload_threshold` attacker clients.
void detect_overloads(const std::vector<ClientRecord>& clients,
                      std::vector<ServerState>& servers, int overload_threshold);

// S proactive reshuffles per trial. Metrics (one value per trial, tagged
// nominal client as the sampling unit):
//   omega            exposed-round fraction of the tagged client
//   Omega            overloaded fraction among servers not hosting the tagged
//   in_service_prob  indicator {in-service rounds >= percent% of S}
//   outage_run_mean  pooled completed-run mean (reporting only)
SimulationOutcome simulate_proactive(const SystemParams& params, int shuffles,
                                     double in_service_percent, std::uint64_t trials,
                                     std::uint64_t seed,
                                     PopulationRegime regime = PopulationRegime::kPersistent,
                                     int threads = 0);

// One outage-run observation per history: the number of consecutive exposed
// rounds immediately after an in-service round (support starts at 0).
// Metrics: outage_run_mean, outage_run_var (each with its standard error).
SimulationOutcome simulate_outage_runs(const SystemParams& params, std::uint64_t histories,
                                       std::uint64_t seed,
                                       PopulationRegime regime = PopulationRegime::kPersistent,
                                       int threads = 0);

// Client churn: per period sample arrivals, retire expired clients,
// reshuffle, detect. Nominal clients are scored over their own lifetimes;
// only clients arriving after warmup and completing inside the horizon
// count. Metrics: mean_nominal, mean_attackers (time averages after warmup),
// in_service_prob (share of completed nominals at >= percent%),
// completed_clients.
SimulationOutcome simulate_churn(const SystemParams& params, const ChurnParams& churn,
                                 int warmup, int horizon, double in_service_percent,
                                 std::uint64_t trials, std::uint64_t seed, int threads = 0);

// Reputation rounds: shuffle everyone, detect, update reputations (+1/-1 or
// autoregressive). Two tagged sub-ensembles (nominal-tagged and
// attacker-tagged) of `trials` each share the root seed. Metrics:
//   fp_rate, fp_zero_rate          tagged nominal ends with R<0 / R==0
//   fn_rate, fn_zero_rate          tagged attacker ends with R>0 / R==0
//   nominal_reputation, attacker_reputation   tagged end-of-run scores
//   pop_fp_rate, pop_fn_rate       population shares (persistent regime only)
SimulationOutcome simulate_reputation(const SystemParams& params, int shuffles,
                                      const ReputationConfig& config, std::uint64_t trials,
                                      std::uint64_t seed,
                                      PopulationRegime regime = PopulationRegime::kPersistent,
                                      int threads = 0);

// Quarantine shuffling: per stage, reshuffle the clients of overloaded
// servers among those servers (stage 1 additionally pulls in the hot
// spares). Metrics per stage k in 0..stages:
//   stage<k>_liberated_nominals, stage<k>_liberated_fraction,
//   stage<k>_overloaded_servers
// plus overload_monotonic (per-trial indicator).
SimulationOutcome simulate_quarantine(const QuarantineParams& params, std::uint64_t trials,
                                      std::uint64_t seed, int threads = 0);

// m-ary fission of overloaded containers (single attacker overloads a
// container). Metrics: rounds_to_quarantine, containers_spun,
// liberated_total, liberated_round<r> for r = 1..8.
SimulationOutcome simulate_fission(std::int64_t initial_clients, std::int64_t initial_attackers,
                                   int arity, int capacity, std::uint64_t trials,
                                   std::uint64_t seed, int threads = 0);

struct SequesterOptions {
    double sequester_fraction = 0.25;     // fraction moved per sequester step
    double quarantine_threshold = 0.0;    // reputation below this is quarantined
    int reputation_rounds = 10;           // shuffle rounds per recovery pass
    int round_cap = 1000;                 // safety cap; overruns are marked truncated
};

// Total-overload recovery: sequester random fractions until some server is
// not overloaded, run reputation rounds, quarantine low scores, reintroduce
// a sequestered batch; repeat until the queue is empty and no server is
// overloaded. Requires attackers >= servers * overload_threshold so the
// initial all-overloaded state is constructible. Metrics: rounds,
// attacker_quarantined_fraction, nominal_quarantined_fraction,
// truncated_fraction.
SimulationOutcome simulate_sequester_recovery(const SystemParams& params,
                                              const SequesterOptions& options,
                                              const ReputationConfig& reputation,
                                              std::uint64_t trials, std::uint64_t seed,
                                              int threads = 0);

}  // namespace shuffleval
