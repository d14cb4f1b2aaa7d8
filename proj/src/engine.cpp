#include "shuffleval/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace shuffleval {

namespace {

// ------------------------------------------------------------------ threads

template <typename Fn>
void run_trials(std::uint64_t trials, int threads, Fn&& per_trial) {
    int workers = threads > 0 ? threads
                              : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (static_cast<std::uint64_t>(workers) > trials)
        workers = static_cast<int>(std::max<std::uint64_t>(trials, 1));

    if (workers == 1) {
        for (std::uint64_t t = 0; t < trials; ++t) per_trial(t);
        return;
    }

    const std::uint64_t block =
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(1024, trials / (8u * workers) + 1));
    std::atomic<std::uint64_t> cursor{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t start = cursor.fetch_add(block);
            if (start >= trials) return;
            const std::uint64_t stop = std::min(trials, start + block);
            try {
                for (std::uint64_t t = start; t < stop; ++t) per_trial(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------- placement

// Slot layout for a balanced placement of `clients` into `servers`:
// server_ids[i] is the server owning slot i; the first (clients % servers)
// servers take the extra slot.
void fill_balanced_labels(std::vector<std::int32_t>& labels,
                          const std::vector<std::int32_t>& server_ids,
                          std::size_t clients) {
    labels.clear();
    labels.reserve(clients);
    const std::size_t m = server_ids.size();
    const std::size_t base = clients / m;
    const std::size_t extra = clients % m;
    for (std::size_t s = 0; s < m; ++s) {
        const std::size_t size = base + (s < extra ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) labels.push_back(server_ids[s]);
    }
}

void fill_contiguous_labels(std::vector<std::int32_t>& labels, int servers,
                            std::size_t clients) {
    labels.clear();
    labels.reserve(clients);
    const std::size_t m = static_cast<std::size_t>(servers);
    const std::size_t base = clients / m;
    const std::size_t extra = clients % m;
    for (std::size_t s = 0; s < m; ++s) {
        const std::size_t size = base + (s < extra ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) labels.push_back(static_cast<std::int32_t>(s));
    }
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t required_rounds(int shuffles, double percent) {
    return static_cast<std::int64_t>(
        std::ceil(static_cast<double>(shuffles) * percent / 100.0));
}

// Linearized standard error of the pooled ratio sum(s_t)/sum(n_t).
double ratio_std_error(const std::vector<double>& sums, const std::vector<double>& counts,
                       double ratio) {
    const std::size_t t = sums.size();
    if (t < 2) return 0.0;
    double total_n = 0.0;
    for (double n : counts) total_n += n;
    if (total_n <= 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        const double d = sums[i] - ratio * counts[i];
        acc += d * d;
    }
    return std::sqrt(acc * static_cast<double>(t) / static_cast<double>(t - 1)) / total_n;
}

}  // namespace

// -------------------------------------------------------- spec-typed surface

void assign_uniform(std::vector<ClientRecord>& clients, std::vector<ServerState>& servers,
                    Rng& rng) {
    if (servers.empty()) throw std::domain_error("assign_uniform: no servers");
    for (auto& s : servers) s.clients.clear();
    if (clients.empty()) return;

    std::int32_t max_id = 0;
    for (const auto& s : servers) max_id = std::max(max_id, s.id);
    std::vector<std::int32_t> slot_of_id(static_cast<std::size_t>(max_id) + 1, -1);
    std::vector<std::int32_t> server_ids;
    server_ids.reserve(servers.size());
    for (std::size_t k = 0; k < servers.size(); ++k) {
        server_ids.push_back(servers[k].id);
        slot_of_id[servers[k].id] = static_cast<std::int32_t>(k);
    }

    std::vector<std::int32_t> labels;
    fill_balanced_labels(labels, server_ids, clients.size());
    rng.shuffle(std::span<std::int32_t>(labels));

    for (std::size_t i = 0; i < clients.size(); ++i) {
        clients[i].server = labels[i];
        servers[slot_of_id[labels[i]]].clients.push_back(clients[i].id);
    }
}

void detect_overloads(const std::vector<ClientRecord>& clients,
                      std::vector<ServerState>& servers, int overload_threshold) {
    std::uint32_t max_id = 0;
    for (const auto& c : clients) max_id = std::max(max_id, c.id);
    std::vector<std::uint8_t> is_attacker(static_cast<std::size_t>(max_id) + 1, 0);
    for (const auto& c : clients)
        if (c.cls == ClientClass::kAttacker) is_attacker[c.id] = 1;

    for (auto& s : servers) {
        int attackers = 0;
        for (std::uint32_t cid : s.clients) attackers += is_attacker[cid];
        s.overloaded = attackers >= overload_threshold;
    }
}

// ------------------------------------------------------------ proactive runs

namespace {

// Compact single-trial world for the shuffle-heavy runs: classes as bytes,
// placement as a label permutation, per-server attacker counts.
struct ShuffleWorld {
    std::size_t total = 0;
    int servers = 0;
    double attacker_prob = 0.0;
    std::vector<std::uint8_t> attacker;  // attacker[0] is the tagged client
    std::vector<std::int32_t> labels;
    std::vector<std::int32_t> counts;

    ShuffleWorld(const SystemParams& params, ClientClass tagged_class) {
        total = static_cast<std::size_t>(params.total_clients());
        servers = params.servers;
        attacker_prob = params.attacker_fraction();
        attacker.resize(total);
        attacker[0] = tagged_class == ClientClass::kAttacker ? 1 : 0;
        counts.resize(static_cast<std::size_t>(servers));
        fill_contiguous_labels(labels, servers, total);
    }

    void draw_population(Rng& rng) {
        for (std::size_t i = 1; i < total; ++i)
            attacker[i] = rng.bernoulli(attacker_prob) ? 1 : 0;
    }

    // One shuffle round: fresh uniform placement plus attacker counts.
    void round(Rng& rng) {
        rng.shuffle(std::span<std::int32_t>(labels));
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < total; ++i) counts[labels[i]] += attacker[i];
    }

    std::int32_t tagged_server() const { return labels[0]; }
};

}  // namespace

SimulationOutcome simulate_proactive(const SystemParams& params, int shuffles,
                                     double in_service_percent, std::uint64_t trials,
                                     std::uint64_t seed, PopulationRegime regime,
                                     int threads) {
    params.validate();
    if (shuffles < 1) throw std::domain_error("simulate_proactive: shuffles must be >= 1");
    if (trials < 1) throw std::domain_error("simulate_proactive: trials must be >= 1");
    const int a = params.overload_threshold;
    const std::int64_t need = required_rounds(shuffles, in_service_percent);

    std::vector<double> omega(trials), big_omega(trials), in_service(trials);
    std::vector<double> run_sums(trials), run_counts(trials);

    run_trials(trials, threads, [&](std::uint64_t t) {
        Rng rng(trial_seed(seed, t));
        ShuffleWorld world(params, ClientClass::kNominal);
        world.draw_population(rng);

        int exposed_rounds = 0;
        std::int64_t overloaded_server_rounds = 0;
        bool anchored = false;
        int run_len = 0;
        double sum_runs = 0.0, n_runs = 0.0;

        for (int s = 0; s < shuffles; ++s) {
            if (s > 0 && regime == PopulationRegime::kResampledEachRound)
                world.draw_population(rng);
            world.round(rng);
            const std::int32_t mine = world.tagged_server();
            const bool exposed = world.counts[mine] >= a;
            exposed_rounds += exposed ? 1 : 0;
            for (int srv = 0; srv < params.servers; ++srv)
                if (srv != mine && world.counts[srv] >= a) ++overloaded_server_rounds;
            if (exposed) {
                if (anchored) ++run_len;
            } else {
                if (anchored) {
                    sum_runs += run_len;
                    n_runs += 1.0;
                    run_len = 0;
                }
                anchored = true;
            }
        }

        omega[t] = static_cast<double>(exposed_rounds) / shuffles;
        big_omega[t] = params.servers > 1
                           ? static_cast<double>(overloaded_server_rounds) /
                                 (static_cast<double>(params.servers - 1) * shuffles)
                           : 0.0;
        in_service[t] = (shuffles - exposed_rounds) >= need ? 1.0 : 0.0;
        run_sums[t] = sum_runs;
        run_counts[t] = n_runs;
    });

    SimulationOutcome out;
    out.seed = seed;
    out.trials = trials;
    out.add_from_values("omega", omega);
    if (params.servers > 1) out.add_from_values("Omega", big_omega);
    out.add_from_values("in_service_prob", in_service);

    double total_runs = 0.0, total_len = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        total_runs += run_counts[t];
        total_len += run_sums[t];
    }
    MetricSummary runs;
    runs.count = static_cast<std::uint64_t>(total_runs);
    if (total_runs > 0.0) {
        runs.mean = total_len / total_runs;
        runs.std_error = ratio_std_error(run_sums, run_counts, runs.mean);
        runs.variance = runs.std_error * runs.std_error * total_runs;
    }
    out.add("outage_run_mean", runs);
    return out;
}

SimulationOutcome simulate_outage_runs(const SystemParams& params, std::uint64_t histories,
                                       std::uint64_t seed, PopulationRegime regime,
                                       int threads) {
    params.validate();
    if (histories < 2) throw std::domain_error("simulate_outage_runs: need at least 2 histories");
    const int a = params.overload_threshold;
    constexpr int kBurnCap = 100000;
    constexpr int kRunCap = 1000000;

    std::vector<double> lengths(histories);

    run_trials(histories, threads, [&](std::uint64_t t) {
        Rng rng(trial_seed(seed, t));
        ShuffleWorld world(params, ClientClass::kNominal);
        world.draw_population(rng);

        auto next_exposed = [&]() {
            if (regime == PopulationRegime::kResampledEachRound) world.draw_population(rng);
            world.round(rng);
            return world.counts[world.tagged_server()] >= a;
        };

        // Anchor on the first in-service round, then measure the outage run
        // that immediately follows (zero-length runs count).
        int burn = 0;
        while (next_exposed()) {
            if (++burn >= kBurnCap) break;
        }
        std::int64_t run = 0;
        while (run < kRunCap && next_exposed()) ++run;
        lengths[t] = static_cast<double>(run);
    });

    SimulationOutcome out;
    out.seed = seed;
    out.trials = histories;
    const MetricSummary mean_summary = summarize(lengths);
    out.add("outage_run_mean", mean_summary);

    // Sample variance as an estimator, with its own (fourth-moment) SE.
    double m4 = 0.0;
    for (double v : lengths) {
        const double d = v - mean_summary.mean;
        m4 += d * d * d * d;
    }
    m4 /= static_cast<double>(histories);
    MetricSummary var_summary;
    var_summary.count = histories;
    var_summary.mean = mean_summary.variance;
    const double spread = m4 - mean_summary.variance * mean_summary.variance;
    var_summary.std_error = spread > 0.0 ? std::sqrt(spread / static_cast<double>(histories)) : 0.0;
    var_summary.variance = spread;
    out.add("outage_run_var", var_summary);
    return out;
}

// --------------------------------------------------------------- reputation

namespace {

struct ReputationTally {
    std::vector<double> tagged_rep;
    std::vector<double> below_zero;
    std::vector<double> at_zero;
    std::vector<double> pop_rate;  // persistent regime only

    explicit ReputationTally(std::uint64_t trials)
        : tagged_rep(trials), below_zero(trials), at_zero(trials), pop_rate(trials) {}
};

void run_reputation_ensemble(const SystemParams& params, int shuffles,
                             const ReputationConfig& config, std::uint64_t trials,
                             std::uint64_t seed, PopulationRegime regime, int threads,
                             ClientClass tagged_class, std::uint64_t stream_offset,
                             ReputationTally& tally) {
    const int a = params.overload_threshold;
    const bool persistent = regime == PopulationRegime::kPersistent;
    const bool autoregressive = config.scheme == ReputationScheme::kAutoregressive;
    const double alpha = config.ar_factor;

    run_trials(trials, threads, [&](std::uint64_t t) {
        Rng rng(trial_seed(seed, 2 * t + stream_offset));
        ShuffleWorld world(params, tagged_class);
        world.draw_population(rng);

        std::vector<double> rep(persistent ? world.total : 1, 0.0);
        double tagged = 0.0;

        for (int s = 0; s < shuffles; ++s) {
            if (s > 0 && regime == PopulationRegime::kResampledEachRound)
                world.draw_population(rng);
            world.round(rng);
            if (persistent) {
                for (std::size_t i = 0; i < world.total; ++i) {
                    const bool bad = world.counts[world.labels[i]] >= a;
                    if (autoregressive)
                        rep[i] = alpha * rep[i] + (bad ? -(1.0 - alpha) : (1.0 - alpha));
                    else
                        rep[i] += bad ? -1.0 : 1.0;
                }
                tagged = rep[0];
            } else {
                const bool bad = world.counts[world.tagged_server()] >= a;
                if (autoregressive)
                    tagged = alpha * tagged + (bad ? -(1.0 - alpha) : (1.0 - alpha));
                else
                    tagged += bad ? -1.0 : 1.0;
            }
        }

        tally.tagged_rep[t] = tagged;
        const bool miss_side = tagged_class == ClientClass::kNominal;
        tally.below_zero[t] = (miss_side ? tagged < 0.0 : tagged > 0.0) ? 1.0 : 0.0;
        tally.at_zero[t] = tagged == 0.0 ? 1.0 : 0.0;

        if (persistent) {
            std::int64_t wrong = 0, members = 0;
            for (std::size_t i = 0; i < world.total; ++i) {
                const bool is_attacker = world.attacker[i] != 0;
                if (is_attacker != (tagged_class == ClientClass::kAttacker)) continue;
                ++members;
                if (miss_side ? rep[i] < 0.0 : rep[i] > 0.0) ++wrong;
            }
            tally.pop_rate[t] =
                members > 0 ? static_cast<double>(wrong) / static_cast<double>(members) : 0.0;
        }
    });
}

}  // namespace

SimulationOutcome simulate_reputation(const SystemParams& params, int shuffles,
                                      const ReputationConfig& config, std::uint64_t trials,
                                      std::uint64_t seed, PopulationRegime regime,
                                      int threads) {
    params.validate();
    config.validate();
    if (shuffles < 1) throw std::domain_error("simulate_reputation: shuffles must be >= 1");
    if (trials < 1) throw std::domain_error("simulate_reputation: trials must be >= 1");

    ReputationTally nominal_tally(trials), attacker_tally(trials);
    run_reputation_ensemble(params, shuffles, config, trials, seed, regime, threads,
                            ClientClass::kNominal, 0, nominal_tally);
    run_reputation_ensemble(params, shuffles, config, trials, seed, regime, threads,
                            ClientClass::kAttacker, 1, attacker_tally);

    SimulationOutcome out;
    out.seed = seed;
    out.trials = trials;
    out.add_from_values("fp_rate", nominal_tally.below_zero);
    out.add_from_values("fp_zero_rate", nominal_tally.at_zero);
    out.add_from_values("nominal_reputation", nominal_tally.tagged_rep);
    out.add_from_values("fn_rate", attacker_tally.below_zero);
    out.add_from_values("fn_zero_rate", attacker_tally.at_zero);
    out.add_from_values("attacker_reputation", attacker_tally.tagged_rep);
    if (regime == PopulationRegime::kPersistent) {
        out.add_from_values("pop_fp_rate", nominal_tally.pop_rate);
        out.add_from_values("pop_fn_rate", attacker_tally.pop_rate);
    }
    return out;
}

// ---------------------------------------------------------------- quarantine

SimulationOutcome simulate_quarantine(const QuarantineParams& params, std::uint64_t trials,
                                      std::uint64_t seed, int threads) {
    params.validate();
    const SystemParams& base = params.base;
    base.exact_load();  // quarantine runs require the exact balanced load
    const double p = base.attacker_fraction();
    const int a = base.overload_threshold;
    const std::size_t total = static_cast<std::size_t>(base.total_clients());
    const int active = base.servers;
    const int all_servers = active + params.hot_spares;
    const int stages = params.stages;

    std::vector<std::vector<double>> liberated(stages + 1), fraction(stages + 1),
        overloaded(stages + 1);
    for (int k = 0; k <= stages; ++k) {
        liberated[k].resize(trials);
        fraction[k].resize(trials);
        overloaded[k].resize(trials);
    }
    std::vector<double> monotonic(trials), conservation(trials);

    run_trials(trials, threads, [&](std::uint64_t t) {
        Rng rng(trial_seed(seed, t));
        std::vector<std::uint8_t> attacker(total);
        std::int64_t realized_attackers = 0;
        for (std::size_t i = 0; i < total; ++i) {
            attacker[i] = rng.bernoulli(p) ? 1 : 0;
            realized_attackers += attacker[i];
        }
        const std::int64_t realized_nominals =
            static_cast<std::int64_t>(total) - realized_attackers;

        std::vector<std::int32_t> server_of(total);
        std::vector<std::int32_t> labels;
        fill_contiguous_labels(labels, active, total);
        rng.shuffle(std::span<std::int32_t>(labels));
        for (std::size_t i = 0; i < total; ++i) server_of[i] = labels[i];

        std::vector<std::int32_t> att_count(all_servers, 0), size_count(all_servers, 0);
        for (std::size_t i = 0; i < total; ++i) {
            att_count[server_of[i]] += attacker[i];
            ++size_count[server_of[i]];
        }

        auto record_stage = [&](int stage, int in_play) {
            std::int64_t freed = 0;
            int over = 0;
            for (int s = 0; s < in_play; ++s) {
                if (att_count[s] >= a)
                    ++over;
                else
                    freed += size_count[s] - att_count[s];
            }
            liberated[stage][t] = static_cast<double>(freed);
            fraction[stage][t] =
                realized_nominals > 0
                    ? static_cast<double>(freed) / static_cast<double>(realized_nominals)
                    : 1.0;
            overloaded[stage][t] = static_cast<double>(over);
        };

        int in_play = active;
        record_stage(0, in_play);
        bool mono = true;
        bool conserved = true;

        std::vector<std::int32_t> pool_servers;
        std::vector<std::size_t> pool_clients;
        std::vector<std::int32_t> pool_labels;
        for (int stage = 1; stage <= stages; ++stage) {
            pool_servers.clear();
            for (int s = 0; s < in_play; ++s)
                if (att_count[s] >= a) pool_servers.push_back(s);

            if (!pool_servers.empty()) {
                if (stage == 1 && params.hot_spares > 0) {
                    for (int s = active; s < all_servers; ++s) pool_servers.push_back(s);
                    in_play = all_servers;
                }
                pool_clients.clear();
                std::vector<std::uint8_t> in_pool(all_servers, 0);
                for (std::int32_t s : pool_servers) in_pool[s] = 1;
                for (std::size_t i = 0; i < total; ++i)
                    if (in_pool[server_of[i]]) pool_clients.push_back(i);

                std::int64_t pool_attackers_before = 0;
                for (std::int32_t s : pool_servers) pool_attackers_before += att_count[s];

                fill_balanced_labels(pool_labels, pool_servers, pool_clients.size());
                rng.shuffle(std::span<std::int32_t>(pool_labels));
                for (std::int32_t s : pool_servers) {
                    att_count[s] = 0;
                    size_count[s] = 0;
                }
                for (std::size_t j = 0; j < pool_clients.size(); ++j) {
                    const std::size_t i = pool_clients[j];
                    server_of[i] = pool_labels[j];
                    att_count[pool_labels[j]] += attacker[i];
                    ++size_count[pool_labels[j]];
                }

                std::int64_t pool_attackers_after = 0;
                std::int64_t placed = 0;
                for (std::int32_t s : pool_servers) {
                    pool_attackers_after += att_count[s];
                    placed += size_count[s];
                }
                if (pool_attackers_after != pool_attackers_before ||
                    placed != static_cast<std::int64_t>(pool_clients.size()))
                    conserved = false;
            }
            record_stage(stage, in_play);
            if (overloaded[stage][t] > overloaded[stage - 1][t]) mono = false;
        }

        monotonic[t] = mono ? 1.0 : 0.0;
        conservation[t] = conserved ? 1.0 : 0.0;
    });

    SimulationOutcome out;
    out.seed = seed;
    out.trials = trials;
    for (int k = 0; k <= stages; ++k) {
        const std::string tag = "stage" + std::to_string(k);
        out.add_from_values(tag + "_liberated_nominals", liberated[k]);
        out.add_from_values(tag + "_liberated_fraction", fraction[k]);
        out.add_from_values(tag + "_overloaded_servers", overloaded[k]);
    }
    out.add_from_values("overload_monotonic", monotonic);
    out.add_from_values("conservation_ok", conservation);
    return out;
}

// -------------------------------------------------------------------- churn

SimulationOutcome simulate_churn(const SystemParams& params, const ChurnParams& churn,
                                 int warmup, int horizon, double in_service_percent,
                                 std::uint64_t trials, std::uint64_t seed, int threads) {
    params.validate();
    churn.validate();
    if (horizon < 1) throw std::domain_error("simulate_churn: horizon must be >= 1");
    if (warmup < 0) throw std::domain_error("simulate_churn: warmup must be >= 0");
    if (trials < 1) throw std::domain_error("simulate_churn: trials must be >= 1");

    const int m = params.servers;
    const int a = params.overload_threshold;
    const bool gaussian = churn.arrival_model == ArrivalModel::kGaussianDeterministic;
    const int periods = warmup + horizon;
    const double threshold = in_service_percent / 100.0;

    struct Member {
        std::uint8_t attacker;
        std::int32_t expire;
        std::int32_t arrived;
        std::int32_t exposed;
        std::int32_t rounds;
    };

    std::vector<double> mean_nominal(trials), mean_attackers(trials), share(trials),
        completed_count(trials), conservation(trials);

    run_trials(trials, threads, [&](std::uint64_t t) {
        Rng rng(trial_seed(seed, t));
        std::vector<Member> alive;
        alive.reserve(4096);
        std::vector<std::int32_t> labels;
        std::vector<std::int32_t> att_count(m);

        // Residual carry keeps the long-run arrival mean at the configured
        // rate even though per-period counts are rounded and clamped at 0.
        double carry_n = 0.0, carry_a = 0.0;
        std::int64_t completed = 0, hits = 0;
        double ksum = 0.0, usum = 0.0;
        int measured = 0;
        bool conserved = true;

        auto draw_arrivals = [&](double rate, double sd, double& carry) -> std::int64_t {
            if (gaussian) {
                const double want = rng.normal(rate, sd) + carry;
                const auto n = std::max<std::int64_t>(0, std::llround(want));
                carry = want - static_cast<double>(n);
                return n;
            }
            return rng.poisson(rate);
        };
        auto lifetime = [&](double mean) -> std::int32_t {
            if (gaussian) return static_cast<std::int32_t>(std::max(1.0, std::round(mean)));
            return static_cast<std::int32_t>(rng.geometric_lifetime(mean));
        };

        for (int period = 0; period < periods; ++period) {
            const std::int64_t before = static_cast<std::int64_t>(alive.size());
            std::int64_t retired = 0;
            for (std::size_t i = 0; i < alive.size();) {
                if (alive[i].expire <= period) {
                    const Member& c = alive[i];
                    if (!c.attacker && c.arrived >= warmup && c.rounds > 0) {
                        ++completed;
                        const double frac =
                            static_cast<double>(c.rounds - c.exposed) / c.rounds;
                        if (frac >= threshold) ++hits;
                    }
                    alive[i] = alive.back();
                    alive.pop_back();
                    ++retired;
                } else {
                    ++i;
                }
            }

            const std::int64_t arr_n =
                draw_arrivals(churn.nominal_arrival_rate, churn.nominal_arrival_sd, carry_n);
            const std::int64_t arr_a =
                draw_arrivals(churn.attacker_arrival_rate, churn.attacker_arrival_sd, carry_a);
            for (std::int64_t j = 0; j < arr_a; ++j)
                alive.push_back({1, period + lifetime(churn.attacker_mean_lifetime),
                                 period, 0, 0});
            for (std::int64_t j = 0; j < arr_n; ++j)
                alive.push_back({0, period + lifetime(churn.nominal_mean_lifetime),
                                 period, 0, 0});
            if (static_cast<std::int64_t>(alive.size()) != before - retired + arr_n + arr_a)
                conserved = false;

            const std::size_t n = alive.size();
            if (n == 0) continue;

            if (period >= warmup) {
                std::int64_t k_alive = 0;
                for (const auto& c : alive) k_alive += c.attacker;
                ksum += static_cast<double>(k_alive);
                usum += static_cast<double>(static_cast<std::int64_t>(n) - k_alive);
                ++measured;
            }

            fill_contiguous_labels(labels, m, n);
            rng.shuffle(std::span<std::int32_t>(labels));
            std::fill(att_count.begin(), att_count.end(), 0);
            for (std::size_t i = 0; i < n; ++i) att_count[labels[i]] += alive[i].attacker;
            for (std::size_t i = 0; i < n; ++i) {
                alive[i].exposed += att_count[labels[i]] >= a ? 1 : 0;
                ++alive[i].rounds;
            }
        }

        mean_nominal[t] = measured > 0 ? usum / measured : 0.0;
        mean_attackers[t] = measured > 0 ? ksum / measured : 0.0;
        share[t] = completed > 0 ? static_cast<double>(hits) / completed : 1.0;
        completed_count[t] = static_cast<double>(completed);
        conservation[t] = conserved ? 1.0 : 0.0;
    });

    SimulationOutcome out;
    out.seed = seed;
    out.trials = trials;
    out.add_from_values("mean_nominal", mean_nominal);
    out.add_from_values("mean_attackers", mean_attackers);
    out.add_from_values("in_service_prob", share);
    out.add_from_values("completed_clients", completed_count);
    out.add_from_values("conservation_ok", conservation);
    return out;
}

// ------------------------------------------------------------------- fission

SimulationOutcome simulate_fission(std::int64_t initial_clients, std::int64_t initial_attackers,
                                   int arity, int capacity, std::uint64_t trials,
                                   std::uint64_t seed, int threads) {
    if (arity < 2) throw std::domain_error("simulate_fission: arity must be >= 2");
    if (capacity < 1) throw std::domain_error("simulate_fission: capacity must be >= 1");
    if (initial_clients < 0 || initial_attackers < 0 || initial_attackers > initial_clients)
        throw std::domain_error("simulate_fission: invalid client counts");
    if (trials < 1) throw std::domain_error("simulate_fission: trials must be >= 1");

    constexpr int kRoundCap = 64;
    constexpr int kReported = 8;

    std::vector<double> rounds_to_q(trials), spun(trials), liberated_total(trials),
        clean_containers(trials), conservation(trials);
    std::vector<std::vector<double>> per_round(kReported);
    for (auto& v : per_round) v.resize(trials);

    run_trials(trials, threads, [&](std::uint64_t t) {
        Rng rng(trial_seed(seed, t));
        struct Container {
            std::int64_t nominals;
            std::int64_t attackers;
        };
        std::vector<Container> live;
        live.push_back({initial_clients - initial_attackers, initial_attackers});

        std::int64_t freed = 0, containers_spun = 0;
        int round = 0;
        bool conserved = true;
        std::vector<std::uint8_t> scratch;
        std::vector<Container> next;
        double round_freed[kReported] = {0};

        auto settle = [&]() {
            // Clean containers liberate their nominals (and are consolidated
            // away); attacker-only containers are the quarantine output.
            std::vector<Container> keep;
            for (const auto& c : live) {
                if (c.attackers == 0)
                    freed += c.nominals;
                else
                    keep.push_back(c);
            }
            live.swap(keep);
        };

        settle();
        while (round < kRoundCap) {
            bool mixed = false;
            for (const auto& c : live)
                if (c.attackers >= 1 && c.nominals > 0) mixed = true;
            if (!mixed) break;
            ++round;

            next.clear();
            const std::int64_t before_freed = freed;
            std::int64_t population_before = freed;
            for (const auto& c : live) population_before += c.nominals + c.attackers;

            for (const auto& c : live) {
                if (c.attackers == 0) {  // already handled by settle
                    next.push_back(c);
                    continue;
                }
                containers_spun += arity - 1;
                const std::int64_t size = c.nominals + c.attackers;
                scratch.assign(static_cast<std::size_t>(size), 0);
                for (std::int64_t i = 0; i < c.attackers; ++i) scratch[i] = 1;
                rng.shuffle(std::span<std::uint8_t>(scratch));
                std::int64_t offset = 0;
                for (int part = 0; part < arity; ++part) {
                    const std::int64_t part_size =
                        size / arity + (part < size % arity ? 1 : 0);
                    std::int64_t att = 0;
                    for (std::int64_t i = 0; i < part_size; ++i) att += scratch[offset + i];
                    offset += part_size;
                    if (part_size > 0) next.push_back({part_size - att, att});
                }
            }
            live.swap(next);
            settle();

            std::int64_t population_after = freed;
            for (const auto& c : live) population_after += c.nominals + c.attackers;
            if (population_after != population_before) conserved = false;
            if (round <= kReported) round_freed[round - 1] = static_cast<double>(freed - before_freed);
        }

        rounds_to_q[t] = static_cast<double>(round);
        spun[t] = static_cast<double>(containers_spun);
        liberated_total[t] = static_cast<double>(freed);
        // greedy consolidation of liberated nominals into capacity-v containers
        clean_containers[t] = static_cast<double>(ceil_div(freed, capacity));
        conservation[t] = conserved ? 1.0 : 0.0;
        for (int r = 0; r < kReported; ++r) per_round[r][t] = round_freed[r];
    });

    SimulationOutcome out;
    out.seed = seed;
    out.trials = trials;
    out.add_from_values("rounds_to_quarantine", rounds_to_q);
    out.add_from_values("containers_spun", spun);
    out.add_from_values("liberated_total", liberated_total);
    out.add_from_values("consolidated_clean_containers", clean_containers);
    for (int r = 0; r < kReported; ++r)
        out.add_from_values("liberated_round" + std::to_string(r + 1), per_round[r]);
    out.add_from_values("conservation_ok", conservation);
    return out;
}

// --------------------------------------------------------- sequester/recover

SimulationOutcome simulate_sequester_recovery(const SystemParams& params,
                                              const SequesterOptions& options,
                                              const ReputationConfig& reputation,
                                              std::uint64_t trials, std::uint64_t seed,
                                              int threads) {
    params.validate();
    reputation.validate();
    if (!(options.sequester_fraction > 0.0 && options.sequester_fraction < 1.0))
        throw std::domain_error("simulate_sequester_recovery: fraction must be in (0,1)");
    if (options.reputation_rounds < 1 || options.round_cap < 1)
        throw std::domain_error("simulate_sequester_recovery: rounds must be >= 1");
    if (trials < 1) throw std::domain_error("simulate_sequester_recovery: trials must be >= 1");

    const int m = params.servers;
    const int a = params.overload_threshold;
    const std::int64_t attackers = params.attackers;
    const std::int64_t nominals = params.nominal;
    const std::int64_t total = attackers + nominals;
    if (attackers < static_cast<std::int64_t>(m) * a)
        throw std::invalid_argument(
            "simulate_sequester_recovery: attackers < servers*overload_threshold, "
            "the all-overloaded initial state is not constructible");

    const bool autoregressive = reputation.scheme == ReputationScheme::kAutoregressive;
    const double alpha = reputation.ar_factor;

    enum : std::uint8_t { kInService, kSequestered, kQuarantined };

    std::vector<double> rounds_taken(trials), attacker_frac(trials), nominal_frac(trials),
        truncated(trials), conservation(trials);

    run_trials(trials, threads, [&](std::uint64_t t) {
        Rng rng(trial_seed(seed, t));
        std::vector<std::uint8_t> attacker(total), state(total, kInService);
        std::vector<double> rep(total, 0.0);
        for (std::int64_t i = 0; i < total; ++i) attacker[i] = i < attackers ? 1 : 0;
        rng.shuffle(std::span<std::uint8_t>(attacker));

        std::vector<std::size_t> in_service, queue;
        std::vector<std::int32_t> labels;
        std::vector<std::int32_t> att_count(m);

        auto collect_in_service = [&] {
            in_service.clear();
            for (std::int64_t i = 0; i < total; ++i)
                if (state[i] == kInService) in_service.push_back(static_cast<std::size_t>(i));
        };

        // Deterministic-by-construction all-overloaded start: deal A
        // attackers to every server, spread the rest uniformly.
        std::vector<std::int32_t> server_of(total, -1);
        {
            std::vector<std::size_t> att_idx, rest_idx;
            for (std::int64_t i = 0; i < total; ++i)
                (attacker[i] ? att_idx : rest_idx).push_back(static_cast<std::size_t>(i));
            rng.shuffle(std::span<std::size_t>(att_idx));
            std::size_t next_forced = 0;
            for (int s = 0; s < m; ++s)
                for (int j = 0; j < a; ++j) server_of[att_idx[next_forced++]] = s;
            for (std::size_t i = next_forced; i < att_idx.size(); ++i)
                rest_idx.push_back(att_idx[i]);
            fill_contiguous_labels(labels, m, rest_idx.size());
            rng.shuffle(std::span<std::int32_t>(labels));
            for (std::size_t j = 0; j < rest_idx.size(); ++j)
                server_of[rest_idx[j]] = labels[j];
        }

        auto recount = [&](auto&& members) {
            std::fill(att_count.begin(), att_count.end(), 0);
            for (std::size_t i : members) att_count[server_of[i]] += attacker[i];
        };
        auto all_overloaded = [&] {
            for (int s = 0; s < m; ++s)
                if (att_count[s] < a) return false;
            return true;
        };
        auto place_in_service = [&] {
            collect_in_service();
            if (in_service.empty()) {
                std::fill(att_count.begin(), att_count.end(), 0);
                return;
            }
            fill_contiguous_labels(labels, m, in_service.size());
            rng.shuffle(std::span<std::int32_t>(labels));
            for (std::size_t j = 0; j < in_service.size(); ++j)
                server_of[in_service[j]] = labels[j];
            recount(in_service);
        };

        collect_in_service();
        recount(in_service);

        int round = 0;
        bool was_truncated = false;
        bool conserved = true;
        for (;;) {
            ++round;

            // 1: sequester until some server is free of overload
            while (all_overloaded() && !in_service.empty()) {
                const auto want = static_cast<std::size_t>(std::ceil(
                    options.sequester_fraction * static_cast<double>(in_service.size())));
                for (std::size_t j = 0; j < want && !in_service.empty(); ++j) {
                    const std::size_t pick = rng.below(in_service.size());
                    state[in_service[pick]] = kSequestered;
                    queue.push_back(in_service[pick]);
                    in_service[pick] = in_service.back();
                    in_service.pop_back();
                }
                place_in_service();
            }

            // 2: reputation shuffles over the in-service population
            for (int s = 0; s < options.reputation_rounds; ++s) {
                place_in_service();
                for (std::size_t i : in_service) {
                    const bool bad = att_count[server_of[i]] >= a;
                    if (autoregressive)
                        rep[i] = alpha * rep[i] + (bad ? -(1.0 - alpha) : (1.0 - alpha));
                    else
                        rep[i] += bad ? -1.0 : 1.0;
                }
            }

            // 3: quarantine low scores, reintroduce part of the queue
            for (std::size_t i : in_service)
                if (rep[i] < options.quarantine_threshold) state[i] = kQuarantined;
            if (!queue.empty()) {
                const auto back = static_cast<std::size_t>(std::ceil(
                    options.sequester_fraction * static_cast<double>(queue.size())));
                for (std::size_t j = 0; j < back && !queue.empty(); ++j) {
                    const std::size_t pick = rng.below(queue.size());
                    state[queue[pick]] = kInService;
                    queue[pick] = queue.back();
                    queue.pop_back();
                }
            }
            place_in_service();

            std::int64_t accounted = static_cast<std::int64_t>(in_service.size() + queue.size());
            for (std::int64_t i = 0; i < total; ++i)
                if (state[i] == kQuarantined) ++accounted;
            if (accounted != total) conserved = false;

            if (queue.empty() && !all_overloaded()) break;
            if (round >= options.round_cap) {
                was_truncated = true;
                break;
            }
        }

        std::int64_t q_att = 0, q_nom = 0;
        for (std::int64_t i = 0; i < total; ++i) {
            if (state[i] != kQuarantined) continue;
            if (attacker[i])
                ++q_att;
            else
                ++q_nom;
        }
        rounds_taken[t] = static_cast<double>(round);
        attacker_frac[t] = attackers > 0 ? static_cast<double>(q_att) / attackers : 0.0;
        nominal_frac[t] = nominals > 0 ? static_cast<double>(q_nom) / nominals : 0.0;
        truncated[t] = was_truncated ? 1.0 : 0.0;
        conservation[t] = conserved ? 1.0 : 0.0;
    });

    SimulationOutcome out;
    out.seed = seed;
    out.trials = trials;
    out.add_from_values("rounds", rounds_taken);
    out.add_from_values("attacker_quarantined_fraction", attacker_frac);
    out.add_from_values("nominal_quarantined_fraction", nominal_frac);
    out.add_from_values("truncated_fraction", truncated);
    out.add_from_values("conservation_ok", conservation);
    return out;
}

}  // namespace shuffleval
