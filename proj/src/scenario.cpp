#include "shuffleval/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "shuffleval/analytics.hpp"
#include "shuffleval/engine.hpp"
#include "shuffleval/mtd.hpp"

namespace shuffleval {

namespace {

// Catalog of recognized keys, in canonical serialization order.
const std::array<const char*, 35> kKnownKeys = {
    "scenario.id", "scenario.mode", "scenario.figure",
    "system.servers", "system.nominal", "system.attackers", "system.overload_threshold",
    "shuffle.rounds", "shuffle.in_service_percent", "shuffle.trials", "shuffle.seed",
    "churn.arrival_model", "churn.nominal_arrival_rate", "churn.attacker_arrival_rate",
    "churn.nominal_mean_lifetime", "churn.attacker_mean_lifetime",
    "churn.nominal_arrival_sd", "churn.attacker_arrival_sd", "churn.warmup", "churn.horizon",
    "reputation.scheme", "reputation.ar_factor", "reputation.confidence",
    "quarantine.stages", "quarantine.hot_spares",
    "mtd.probe_rate", "mtd.reset_rate", "mtd.rate_model", "mtd.z_grid",
    "sweep.parameter", "sweep.values",
    "output.path", "output.format",
    "scenario.threads",  // reserved; accepted but unused in files
    "scenario.notes"};

const std::array<const char*, 20> kSweepable = {
    "system.servers", "system.nominal", "system.attackers", "system.overload_threshold",
    "shuffle.rounds", "shuffle.in_service_percent",
    "churn.nominal_arrival_rate", "churn.attacker_arrival_rate",
    "churn.nominal_mean_lifetime", "churn.attacker_mean_lifetime",
    "churn.nominal_arrival_sd", "churn.attacker_arrival_sd", "churn.warmup", "churn.horizon",
    "reputation.ar_factor", "reputation.confidence",
    "quarantine.stages", "quarantine.hot_spares",
    "mtd.probe_rate", "mtd.reset_rate"};

bool known_key(const std::string& key) {
    return std::find_if(kKnownKeys.begin(), kKnownKeys.end(),
                        [&](const char* k) { return key == k; }) != kKnownKeys.end();
}

bool sweepable_key(const std::string& key) {
    return std::find_if(kSweepable.begin(), kSweepable.end(),
                        [&](const char* k) { return key == k; }) != kSweepable.end();
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ScenarioError("empty numeric value for key '" + key + "'");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw ScenarioError("key '" + key + "': cannot parse number from '" + t + "'");
    return v;
}

}  // namespace

const std::string& ScenarioConfig::raw(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ScenarioError("missing required key '" + key + "'");
    return it->second;
}

double ScenarioConfig::number(const std::string& key) const {
    return parse_number(key, raw(key));
}

std::int64_t ScenarioConfig::integer(const std::string& key) const {
    const double v = number(key);
    const auto i = static_cast<std::int64_t>(v);
    if (static_cast<double>(i) != v)
        throw ScenarioError("key '" + key + "': expected an integer, got '" + raw(key) + "'");
    return i;
}

std::uint64_t ScenarioConfig::unsigned_integer(const std::string& key) const {
    const std::int64_t v = integer(key);
    if (v < 0) throw ScenarioError("key '" + key + "': expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

std::vector<double> ScenarioConfig::number_list(const std::string& key) const {
    std::string text = raw(key);
    for (char& c : text)
        if (c == ',') c = ' ';
    std::istringstream in(text);
    std::vector<double> out;
    std::string token;
    while (in >> token) out.push_back(parse_number(key, token));
    if (out.empty()) throw ScenarioError("key '" + key + "': empty value list");
    return out;
}

ScenarioMode ScenarioConfig::mode() const {
    const std::string& m = raw("scenario.mode");
    if (m == "analytic") return ScenarioMode::kAnalytic;
    if (m == "simulate") return ScenarioMode::kSimulate;
    if (m == "mtd") return ScenarioMode::kMtd;
    if (m == "figure") return ScenarioMode::kFigure;
    throw ScenarioError("key 'scenario.mode': unknown mode '" + m +
                        "' (expected analytic|simulate|mtd|figure)");
}

std::string ScenarioConfig::id() const { return raw("scenario.id"); }

ScenarioConfig parse_scenario_text(const std::string& text) {
    ScenarioConfig config;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ScenarioError("line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ScenarioError("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ScenarioError("line " + std::to_string(line_no) + ": empty key");
        if (key.find('.') == std::string::npos) {
            if (section.empty())
                throw ScenarioError("line " + std::to_string(line_no) + ": key '" + key +
                                    "' outside any section");
            key = section + "." + key;
        }
        if (value.empty()) throw ScenarioError("empty value for key '" + key + "'");
        if (!config.values.emplace(key, value).second)
            throw ScenarioError("duplicate key '" + key + "'");
    }
    return config;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

std::string serialize_scenario(const ScenarioConfig& config) {
    std::ostringstream out;
    std::string current_section;
    auto emit = [&](const std::string& key, const std::string& value) {
        const std::string section = key.substr(0, key.find('.'));
        if (section != current_section) {
            if (!current_section.empty()) out << "\n";
            out << "[" << section << "]\n";
            current_section = section;
        }
        out << key.substr(key.find('.') + 1) << " = " << value << "\n";
    };
    for (const char* key : kKnownKeys) {
        const auto it = config.values.find(key);
        if (it != config.values.end()) emit(it->first, it->second);
    }
    for (const auto& [key, value] : config.values)
        if (!known_key(key)) emit(key, value);
    return out.str();
}

namespace {

SystemParams system_from(const ScenarioConfig& c) {
    SystemParams params;
    params.servers = static_cast<int>(c.integer("system.servers"));
    params.nominal = c.integer("system.nominal");
    params.attackers = c.integer("system.attackers");
    params.overload_threshold = static_cast<int>(c.integer("system.overload_threshold"));
    return params;
}

ChurnParams churn_from(const ScenarioConfig& c) {
    ChurnParams churn;
    churn.nominal_arrival_rate = c.number("churn.nominal_arrival_rate");
    churn.attacker_arrival_rate = c.number("churn.attacker_arrival_rate");
    churn.nominal_mean_lifetime = c.number("churn.nominal_mean_lifetime");
    churn.attacker_mean_lifetime = c.number("churn.attacker_mean_lifetime");
    if (c.has("churn.arrival_model")) {
        const std::string& m = c.raw("churn.arrival_model");
        if (m == "poisson-exponential")
            churn.arrival_model = ArrivalModel::kPoissonExponential;
        else if (m == "gaussian-deterministic")
            churn.arrival_model = ArrivalModel::kGaussianDeterministic;
        else
            throw ScenarioError("key 'churn.arrival_model': unknown model '" + m + "'");
    }
    if (c.has("churn.nominal_arrival_sd"))
        churn.nominal_arrival_sd = c.number("churn.nominal_arrival_sd");
    if (c.has("churn.attacker_arrival_sd"))
        churn.attacker_arrival_sd = c.number("churn.attacker_arrival_sd");
    return churn;
}

ReputationConfig reputation_from(const ScenarioConfig& c) {
    ReputationConfig rep;
    if (c.has("reputation.scheme")) {
        const std::string& s = c.raw("reputation.scheme");
        if (s == "unit-increment")
            rep.scheme = ReputationScheme::kUnitIncrement;
        else if (s == "autoregressive")
            rep.scheme = ReputationScheme::kAutoregressive;
        else
            throw ScenarioError("key 'reputation.scheme': unknown scheme '" + s + "'");
    }
    if (c.has("reputation.ar_factor")) rep.ar_factor = c.number("reputation.ar_factor");
    if (c.has("reputation.confidence"))
        rep.confidence_multiplier = c.number("reputation.confidence");
    return rep;
}

MtdRateModel rate_model_from(const ScenarioConfig& c) {
    const std::string& m = c.raw("mtd.rate_model");
    if (m == "constant") return MtdRateModel::kConstant;
    if (m == "linear-remaining") return MtdRateModel::kLinearRemaining;
    if (m == "linear-remaining-normalized") return MtdRateModel::kLinearRemainingNormalized;
    throw ScenarioError("key 'mtd.rate_model': unknown model '" + m +
                        "' (expected constant|linear-remaining|linear-remaining-normalized)");
}

bool section_present(const ScenarioConfig& c, const std::string& prefix) {
    const auto it = c.values.lower_bound(prefix + ".");
    return it != c.values.end() && it->first.rfind(prefix + ".", 0) == 0;
}

}  // namespace

void validate_scenario(const ScenarioConfig& config) {
    for (const auto& [key, value] : config.values)
        if (!known_key(key)) throw ScenarioError("unknown key '" + key + "'");

    const std::string id = config.id();
    for (char ch : id)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
            throw ScenarioError("key 'scenario.id': invalid character in id");

    const ScenarioMode mode = config.mode();

    auto require = [&](const char* key) {
        if (!config.has(key)) throw ScenarioError("missing required key '" + std::string(key) + "'");
    };

    if (mode == ScenarioMode::kAnalytic || mode == ScenarioMode::kSimulate) {
        for (const char* key : {"system.servers", "system.nominal", "system.attackers",
                                "system.overload_threshold", "shuffle.rounds",
                                "shuffle.in_service_percent"})
            require(key);
        system_from(config).validate();
        if (config.integer("shuffle.rounds") < 1)
            throw ScenarioError("key 'shuffle.rounds': must be >= 1");
        const double pct = config.number("shuffle.in_service_percent");
        if (!(pct >= 0.0 && pct <= 100.0))
            throw ScenarioError("key 'shuffle.in_service_percent': must be in [0,100]");
    }
    if (mode == ScenarioMode::kSimulate) {
        require("shuffle.trials");
        if (config.integer("shuffle.trials") < 1)
            throw ScenarioError("key 'shuffle.trials': must be >= 1");
        if (section_present(config, "churn")) {
            churn_from(config).validate();
            if (config.has("churn.warmup") && config.integer("churn.warmup") < 0)
                throw ScenarioError("key 'churn.warmup': must be >= 0");
            if (config.has("churn.horizon") && config.integer("churn.horizon") < 1)
                throw ScenarioError("key 'churn.horizon': must be >= 1");
        }
        if (section_present(config, "reputation")) reputation_from(config).validate();
        if (section_present(config, "quarantine")) {
            QuarantineParams q;
            q.base = system_from(config);
            if (config.has("quarantine.stages"))
                q.stages = static_cast<int>(config.integer("quarantine.stages"));
            if (config.has("quarantine.hot_spares"))
                q.hot_spares = static_cast<int>(config.integer("quarantine.hot_spares"));
            q.validate();
            q.base.exact_load();
        }
    }
    if (mode == ScenarioMode::kMtd) {
        for (const char* key : {"system.servers", "mtd.rate_model", "mtd.z_grid"}) require(key);
        rate_model_from(config);
        if (config.integer("system.servers") < 1)
            throw ScenarioError("key 'system.servers': must be >= 1");
        for (double z : config.number_list("mtd.z_grid"))
            if (z < 0.0) throw ScenarioError("key 'mtd.z_grid': z values must be >= 0");
        if (config.has("mtd.reset_rate") && !(config.number("mtd.reset_rate") > 0.0))
            throw ScenarioError("key 'mtd.reset_rate': must be > 0");
    }
    if (mode == ScenarioMode::kFigure) require("scenario.figure");

    const bool has_param = config.has("sweep.parameter");
    const bool has_values = config.has("sweep.values");
    if (has_param != has_values)
        throw ScenarioError("keys 'sweep.parameter' and 'sweep.values' must appear together");
    if (has_param) {
        const std::string& param = config.raw("sweep.parameter");
        if (!sweepable_key(param))
            throw ScenarioError("key 'sweep.parameter': '" + param + "' is not a sweepable field");
        config.number_list("sweep.values");
    }
    if (config.has("output.format") && config.raw("output.format") != "csv")
        throw ScenarioError("key 'output.format': only 'csv' is supported");
}

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

namespace {

void append_analytic_rows(const ScenarioConfig& c, const std::vector<double>& sweep_values,
                          std::uint64_t seed, ResultTable& table) {
    const SystemParams params = system_from(c);
    const int rounds = static_cast<int>(c.integer("shuffle.rounds"));
    const double pct = c.number("shuffle.in_service_percent");
    const std::pair<const char*, double> metrics[] = {
        {"omega", nominal_exposure_prob(params)},
        {"Omega", server_overload_prob(params)},
        {"in_service_prob", in_service_prob(params, rounds, pct)},
        {"fp_rate", false_positive_rate(params, rounds)},
        {"fn_rate", false_negative_rate(params, rounds)},
    };
    for (const auto& [name, value] : metrics)
        table.rows.push_back({c.id(), sweep_values, name, value, std::nullopt, 0, seed});
}

void append_outcome_rows(const std::string& id, const std::vector<double>& sweep_values,
                         const SimulationOutcome& outcome, const std::string& prefix,
                         ResultTable& table) {
    for (const auto& m : outcome.metrics)
        table.rows.push_back({id, sweep_values, prefix + m.name, m.summary.mean,
                              m.summary.std_error, outcome.trials, outcome.seed});
}

void append_simulate_rows(const ScenarioConfig& c, const std::vector<double>& sweep_values,
                          std::uint64_t seed, std::uint64_t trials, int threads,
                          ResultTable& table) {
    const SystemParams params = system_from(c);
    const int rounds = static_cast<int>(c.integer("shuffle.rounds"));
    const double pct = c.number("shuffle.in_service_percent");

    append_outcome_rows(c.id(), sweep_values,
                        simulate_proactive(params, rounds, pct, trials, seed,
                                           PopulationRegime::kPersistent, threads),
                        "", table);
    if (section_present(c, "churn")) {
        const int warmup = c.has("churn.warmup") ? static_cast<int>(c.integer("churn.warmup")) : 300;
        const int horizon =
            c.has("churn.horizon") ? static_cast<int>(c.integer("churn.horizon")) : 400;
        append_outcome_rows(c.id(), sweep_values,
                            simulate_churn(params, churn_from(c), warmup, horizon, pct, trials,
                                           seed, threads),
                            "churn_", table);
    }
    if (section_present(c, "reputation")) {
        append_outcome_rows(c.id(), sweep_values,
                            simulate_reputation(params, rounds, reputation_from(c), trials, seed,
                                                PopulationRegime::kPersistent, threads),
                            "", table);
    }
    if (section_present(c, "quarantine")) {
        QuarantineParams q;
        q.base = params;
        if (c.has("quarantine.stages"))
            q.stages = static_cast<int>(c.integer("quarantine.stages"));
        if (c.has("quarantine.hot_spares"))
            q.hot_spares = static_cast<int>(c.integer("quarantine.hot_spares"));
        append_outcome_rows(c.id(), sweep_values, simulate_quarantine(q, trials, seed, threads),
                            "", table);
    }
}

void append_mtd_rows(const ScenarioConfig& c, const std::vector<double>& sweep_values,
                     std::uint64_t seed, ResultTable& table) {
    MtdParams params;
    params.proxies = static_cast<int>(c.integer("system.servers"));
    params.rate_model = rate_model_from(c);
    params.reset_rate = c.has("mtd.reset_rate") ? c.number("mtd.reset_rate") : 1.0;
    if (c.has("mtd.probe_rate")) params.probe_rate = c.number("mtd.probe_rate");
    const std::vector<double> grid = c.number_list("mtd.z_grid");
    for (const auto& point : unknown_proxies_curve(params, grid)) {
        std::vector<double> sweep = sweep_values;
        sweep.push_back(point.z);
        table.rows.push_back(
            {c.id(), sweep, "unknown_proxies", point.unknown, std::nullopt, 0, seed});
    }
}

}  // namespace

ResultTable run_scenario(const ScenarioConfig& config, const RunOverrides& overrides) {
    validate_scenario(config);
    const ScenarioMode mode = config.mode();
    if (mode == ScenarioMode::kFigure)
        throw ScenarioError(
            "figure scenarios are driven by the 'figure' subcommand (preset name required)");

    ScenarioConfig working = config;
    if (overrides.seed) working.values["shuffle.seed"] = std::to_string(*overrides.seed);
    if (overrides.trials) working.values["shuffle.trials"] = std::to_string(*overrides.trials);

    const std::uint64_t seed =
        working.has("shuffle.seed") ? working.unsigned_integer("shuffle.seed") : 0;
    const std::uint64_t trials =
        working.has("shuffle.trials") ? working.unsigned_integer("shuffle.trials") : 0;
    if (mode == ScenarioMode::kSimulate && trials < 1)
        throw ScenarioError("key 'shuffle.trials': must be >= 1");

    ResultTable table;
    std::vector<std::pair<std::string, double>> sweep_points;
    if (working.has("sweep.parameter")) {
        table.sweep_columns.push_back(working.raw("sweep.parameter"));
        for (double v : working.number_list("sweep.values"))
            sweep_points.emplace_back(working.raw("sweep.parameter"), v);
    } else {
        sweep_points.emplace_back("", 0.0);
    }
    if (mode == ScenarioMode::kMtd) table.sweep_columns.push_back("z");

    for (const auto& [param, value] : sweep_points) {
        ScenarioConfig point = working;
        std::vector<double> sweep_values;
        if (!param.empty()) {
            point.values[param] = format_number(value);
            sweep_values.push_back(value);
            validate_scenario(point);  // swept value must still satisfy the contract
        }
        switch (mode) {
            case ScenarioMode::kAnalytic:
                append_analytic_rows(point, sweep_values, seed, table);
                break;
            case ScenarioMode::kSimulate:
                append_simulate_rows(point, sweep_values, seed, trials, overrides.threads, table);
                break;
            case ScenarioMode::kMtd:
                append_mtd_rows(point, sweep_values, seed, table);
                break;
            case ScenarioMode::kFigure:
                break;  // unreachable
        }
    }
    return table;
}

void emit_csv(const ResultTable& table, std::ostream& out) {
    out << "scenario_id";
    for (const auto& col : table.sweep_columns) out << "," << col;
    out << ",metric,value,std_error,trials,seed\n";
    for (const auto& row : table.rows) {
        out << row.scenario_id;
        for (std::size_t i = 0; i < table.sweep_columns.size(); ++i)
            out << ","
                << (i < row.sweep_values.size() ? format_number(row.sweep_values[i]) : "");
        out << "," << row.metric << "," << format_number(row.value) << ",";
        if (row.std_error) out << format_number(*row.std_error);
        out << "," << row.trials << "," << row.seed << "\n";
    }
}

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path '" + path + "'");
    emit_csv(table, out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for output path '" + path + "'");
}

}  // namespace shuffleval
