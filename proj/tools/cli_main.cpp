// sparseopt command line: config-driven experiment runner plus the built-in
// oracle and acceptance batteries.
//
//   sparseopt run <config.json> [--seed N] [--out DIR]
//   sparseopt validate <config.json>
//   sparseopt oracle-suite
//   sparseopt acceptance [--workers N]
//
// Default output directory comes from $SPARSEOPT_OUT_DIR when --out is not
// given. Exit codes: 0 ok, 1 input error, 2 assertion-style failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sparseopt/acceptance.hpp"
#include "sparseopt/cli.hpp"
#include "sparseopt/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sparse-graph random optimization laboratory"};
    app.set_version_flag("--version", sparseopt::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    if (const char* env = std::getenv("SPARSEOPT_OUT_DIR")) out_dir = env;
    std::optional<std::uint64_t> seed_override;
    std::uint64_t seed_value = 0;
    int workers = 0;

    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "JSON config file")->required();
    auto* seed_opt = run->add_option("--seed", seed_value, "override master_seed");
    run->add_option("--out", out_dir, "output directory for relative paths");

    auto* validate = app.add_subcommand("validate", "validate a config without running");
    validate->add_option("config", config_path, "JSON config file")->required();

    auto* oracle = app.add_subcommand("oracle-suite", "run the oracle-equivalence tests");

    auto* accept = app.add_subcommand("acceptance", "run the full acceptance battery");
    accept->add_option("--workers", workers, "worker threads (default: hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (seed_opt->count() > 0) seed_override = seed_value;
            auto result = sparseopt::cli::run_config_file(config_path, seed_override, out_dir);
            for (const auto& f : result.output_files) std::cout << "wrote " << f << "\n";
            std::cout << result.summary << "\n";
            return result.exit_code;
        }
        if (validate->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw sparseopt::cli::ConfigError("cannot open config file " + config_path);
            sparseopt::cli::validate_config(nlohmann::json::parse(in));
            std::cout << "config ok\n";
            return 0;
        }
        if (oracle->parsed())
            return sparseopt::acceptance::run_oracle_suite(std::cout) ? 0 : 2;
        if (accept->parsed())
            return sparseopt::acceptance::run_all(std::cout, workers) ? 0 : 2;
    } catch (const sparseopt::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
