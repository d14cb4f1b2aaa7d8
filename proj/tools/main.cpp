#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "shuffleval/figures.hpp"
#include "shuffleval/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string out_path;
    int threads = 0;
};

shuffleval::RunOverrides overrides_of(const GlobalOptions& opts) {
    shuffleval::RunOverrides o;
    o.seed = opts.seed;
    o.trials = opts.trials;
    o.threads = opts.threads;
    return o;
}

void write_table(const shuffleval::ResultTable& table, const GlobalOptions& opts,
                 const shuffleval::ScenarioConfig* config) {
    std::string path = opts.out_path;
    if (path.empty() && config != nullptr && config->has("output.path"))
        path = config->raw("output.path");
    if (path.empty() || path == "-")
        shuffleval::emit_csv(table, std::cout);
    else
        shuffleval::emit_csv(table, path);
}

// Runs a config-driven mode, forcing scenario.mode to match the subcommand.
int run_mode(const GlobalOptions& opts, const std::string& mode) {
    if (opts.config_path.empty()) {
        std::cerr << "error: --config <path> is required for the '" << mode << "' subcommand\n";
        return kExitValidation;
    }
    shuffleval::ScenarioConfig config;
    try {
        config = shuffleval::parse_scenario_file(opts.config_path);
        config.values["scenario.mode"] = mode;
        shuffleval::validate_scenario(config);
    } catch (const shuffleval::ScenarioError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    }
    try {
        const shuffleval::ResultTable table = shuffleval::run_scenario(config, overrides_of(opts));
        write_table(table, opts, &config);
    } catch (const shuffleval::ScenarioError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shuffling-defense evaluation toolkit: closed-form analytics and seeded "
                 "Monte Carlo simulation for proxied multiserver systems"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "Scenario config file");
    app.add_option("--seed", opts.seed, "Override shuffle.seed");
    app.add_option("--trials", opts.trials, "Override shuffle.trials");
    app.add_option("--out", opts.out_path, "Output CSV path ('-' for stdout)");
    app.add_option("--threads", opts.threads,
                   "Simulation worker threads (0 = hardware concurrency)");

    app.add_subcommand("analytic", "Evaluate the closed forms for a scenario");
    app.add_subcommand("simulate", "Run the Monte Carlo engine for a scenario");
    app.add_subcommand("mtd", "Evaluate the address-rotation Markov model");

    std::string figure_name;
    CLI::App* figure = app.add_subcommand("figure", "Reproduce a named figure preset");
    figure->add_option("preset", figure_name, "Preset name (see list-figures)")->required();

    app.add_subcommand("list-figures", "List available figure presets");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
    validate->add_option("file", validate_path, "Scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    if (app.got_subcommand("analytic")) return run_mode(opts, "analytic");
    if (app.got_subcommand("simulate")) return run_mode(opts, "simulate");
    if (app.got_subcommand("mtd")) return run_mode(opts, "mtd");

    if (app.got_subcommand("figure")) {
        try {
            const shuffleval::ResultTable table =
                shuffleval::run_figure(figure_name, overrides_of(opts));
            write_table(table, opts, nullptr);
        } catch (const shuffleval::ScenarioError& e) {
            std::cerr << "validation error: " << e.what() << "\n";
            return kExitValidation;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitRuntime;
        }
        return kExitOk;
    }

    if (app.got_subcommand("list-figures")) {
        for (const auto& preset : shuffleval::figure_presets())
            std::cout << preset.name << "\t" << preset.description << "\n";
        return kExitOk;
    }

    if (app.got_subcommand("validate")) {
        try {
            shuffleval::validate_scenario(shuffleval::parse_scenario_file(validate_path));
        } catch (const shuffleval::ScenarioError& e) {
            std::cerr << "validation error: " << e.what() << "\n";
            return kExitValidation;
        }
        std::cout << "OK\n";
        return kExitOk;
    }

    return kExitValidation;
}
