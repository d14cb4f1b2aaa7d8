#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace shuffleval {

/// Raised for malformed or invalid scenario input; the message names the
/// offending key or line.
class ScenarioError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioMode { kAnalytic, kSimulate, kMtd, kFigure };

/// Parsed scenario file: flat dotted keys ("system.servers") with string
/// values, exactly as written. Section headers in the file prefix the keys.
struct ScenarioConfig {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const std::string& raw(const std::string& key) const;
    double number(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    std::uint64_t unsigned_integer(const std::string& key) const;
    std::vector<double> number_list(const std::string& key) const;

    ScenarioMode mode() const;
    std::string id() const;
};

ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig parse_scenario_file(const std::string& path);

// Canonical key=value rendering grouped into [section] blocks; parsing the
// output yields the same key set and values.
std::string serialize_scenario(const ScenarioConfig& config);

// Throws ScenarioError naming the first offending key.
void validate_scenario(const ScenarioConfig& config);

struct ResultRow {
    std::string scenario_id;
    std::vector<double> sweep_values;  // aligned with ResultTable::sweep_columns
    std::string metric;
    double value = 0.0;
    std::optional<double> std_error;  // empty for analytic rows
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
};

struct ResultTable {
    std::vector<std::string> sweep_columns;
    std::vector<ResultRow> rows;
};

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    int threads = 0;  // 0 = hardware concurrency
};

// Dispatches on the scenario mode; sweeps expand in declaration order.
ResultTable run_scenario(const ScenarioConfig& config, const RunOverrides& overrides = {});

// Header row then data rows, comma separated, newline terminated, %.12g
// numeric formatting (locale independent).
void emit_csv(const ResultTable& table, std::ostream& out);
void emit_csv(const ResultTable& table, const std::string& path);

// %.12g rendering shared by the CSV writer and tests.
std::string format_number(double value);

}  // namespace shuffleval
