#pragma once

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forage/harness.hpp"

namespace forage {

// Exit codes: 0 success, 1 configuration error, 2 I/O error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

namespace climpl {

struct CommonFlags {
    std::string profile;
    std::string out;
    long long seed = -1;
    int replicates = -1;
    int jobs = -1;
};

inline void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--profile", flags.profile, "scale preset: ga-desk, ql-desk, or paper");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--seed", flags.seed, "base seed (replicate r runs on seed+r)");
    cmd->add_option("--replicates", flags.replicates, "number of replicates");
    cmd->add_option("--jobs", flags.jobs, "worker threads (never affects results)");
}

// config file < profile < explicit flags; the FORAGELAB_OUT root supplies a
// default output directory named after the condition and seed.
inline ExperimentConfig resolve(const std::string& config_path, const CommonFlags& flags,
                                Pipeline expected) {
    ExperimentConfig cfg = load_config(config_path);
    cfg.pipeline = expected;
    if (!flags.profile.empty()) {
        apply_profile(cfg, flags.profile);
        if (cfg.pipeline != expected)
            throw ConfigError("profile '" + flags.profile + "' does not match this subcommand");
    }
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.replicates >= 0) cfg.replicates = flags.replicates;
    if (flags.jobs >= 0) cfg.jobs = flags.jobs;
    if (!flags.out.empty()) cfg.out = flags.out;
    if (cfg.out.empty()) {
        if (const char* root = std::getenv("FORAGELAB_OUT"))
            cfg.out = std::string(root) + "/" + cfg.condition_label() + "-s" +
                      std::to_string(cfg.seed);
    }
    validate_config(cfg);
    if (cfg.out.empty())
        throw ConfigError("no output directory: pass --out, set out= in the config, "
                          "or set FORAGELAB_OUT");
    return cfg;
}

} // namespace climpl

inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"foraging group-reward experiment laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    climpl::CommonFlags flags;

    auto* evolve = app.add_subcommand("evolve", "run the genetic-algorithm pipeline");
    evolve->add_option("config", config_path, "key=value config file")->required();
    climpl::add_common(evolve, flags);

    auto* qlearn = app.add_subcommand("qlearn", "run the Q-learning pipeline");
    qlearn->add_option("config", config_path, "key=value config file")->required();
    climpl::add_common(qlearn, flags);

    std::vector<std::string> compare_dirs;
    std::string compare_out;
    auto* compare = app.add_subcommand("compare", "pairwise KS tests and plots over runs");
    compare->add_option("dirs", compare_dirs, "completed run directories")->required();
    compare->add_option("--out", compare_out, "output directory")->required();

    auto* validate = app.add_subcommand("validate", "check a config file and print it resolved");
    validate->add_option("config", config_path, "key=value config file")->required();
    climpl::add_common(validate, flags);

    std::vector<const char*> argv;
    argv.push_back("foragelab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (evolve->parsed() || qlearn->parsed()) {
            Pipeline expected = evolve->parsed() ? Pipeline::GA : Pipeline::QLearning;
            ExperimentConfig cfg = climpl::resolve(config_path, flags, expected);
            RunResult result = run_experiment(cfg);
            out << "wrote " << result.dir.string() << " (" << cfg.replicates
                << " replicates)\n";
            return kExitOk;
        }
        if (compare->parsed()) {
            std::vector<std::filesystem::path> dirs(compare_dirs.begin(), compare_dirs.end());
            CompareResult result = compare_runs(dirs, compare_out);
            for (const auto& w : result.warnings) err << "warning: " << w << "\n";
            out << "wrote " << compare_out << " (" << result.m << " comparisons)\n";
            return kExitOk;
        }
        if (validate->parsed()) {
            ExperimentConfig cfg = load_config(config_path);
            if (!flags.profile.empty()) apply_profile(cfg, flags.profile);
            if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
            if (flags.replicates >= 0) cfg.replicates = flags.replicates;
            if (flags.jobs >= 0) cfg.jobs = flags.jobs;
            if (!flags.out.empty()) cfg.out = flags.out;
            validate_config(cfg);
            out << describe_config(cfg);
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitConfig;
}

} // namespace forage
