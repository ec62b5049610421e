#include <CLI11.hpp>

#include <cstdio>

#include "otk/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Riemann-sum estimation error for occupation-time functionals "
                 "of stationary Markov processes"};
    app.set_version_flag("--version", std::string(otk::cli::kVersion));

    std::string config_path;
    std::string out_dir;
    long long seed_override = -1;
    long long reps_override = -1;
    int threads = 0;

    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "JSON config file")->required();
    run->add_option("--seed", seed_override, "override master_seed");
    run->add_option("--reps", reps_override, "override replication count");
    run->add_option("--out", out_dir, "override output directory");
    run->add_option("--threads", threads, "worker threads (default: hardware)");

    auto* list = app.add_subcommand("list", "list registered processes and functions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*list) {
            std::fputs(otk::cli::list_registry().c_str(), stdout);
            return 0;
        }
        if (*run) {
            otk::cli::RunOverrides overrides;
            if (seed_override >= 0) overrides.master_seed = static_cast<std::uint64_t>(seed_override);
            if (reps_override >= 0) overrides.reps = static_cast<std::size_t>(reps_override);
            if (!out_dir.empty()) overrides.out_dir = out_dir;
            if (threads > 0) overrides.threads = threads;
            return otk::cli::run_config_file(config_path, overrides);
        }
    } catch (const otk::cli::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::fputs(app.help().c_str(), stdout);
    return 0;
}
