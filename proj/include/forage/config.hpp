#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "forage/csv.hpp"
#include "forage/evolution.hpp"
#include "forage/qlearning.hpp"
#include "forage/reward.hpp"

namespace forage {

// Raised for anything the user got wrong (file contents, flag combinations);
// the CLI maps it to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised for filesystem trouble; the CLI maps it to exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Pipeline { GA, QLearning };

inline std::string to_string(Pipeline p) { return p == Pipeline::GA ? "ga" : "ql"; }

// Everything a run needs, resolved from config file + profile + flags.
// Replicate r runs on seed `seed + r`.
struct ExperimentConfig {
    Pipeline pipeline = Pipeline::GA;
    SelectionMode ga_mode = SelectionMode::GroupLevel;
    ControllerMode ql_mode = ControllerMode::Centralized;
    RewardScheme scheme = RewardScheme::Minimum;
    int replicates = 40;
    std::uint64_t seed = 1;
    std::string out;
    std::string condition; // label for summary/compare; derived when empty
    int jobs = 1;

    // GA scale
    int pop_size = 100;
    int generations = 50000;
    int episode_steps = 256;
    int record_interval = 0; // 0 = pipeline default (GA 100, QL 1)
    MutationConfig mutation{};
    std::size_t initial_genome_len = 5000;
    int initial_codon_pairs = 16;

    // Q-learning scale
    int epochs = 10000;
    int steps_per_epoch = 50;
    double alpha = 0.8;
    double gamma = 0.9;
    double epsilon0 = 1.0;
    double epsilon_decay = 0.999;
    int replay_sample = 2000;
    std::size_t replay_capacity = 50000;
    std::int64_t prune_age = 2000;
    RewardTiming reward_timing = RewardTiming::PerStep;
    bool aliased_identity = false;

    std::string condition_label() const {
        if (!condition.empty()) return condition;
        std::string mode = pipeline == Pipeline::GA ? to_string(ga_mode) : to_string(ql_mode);
        return to_string(pipeline) + "-" + mode + "-" + to_string(scheme);
    }

    int resolved_record_interval() const {
        if (record_interval > 0) return record_interval;
        return pipeline == Pipeline::GA ? 100 : 1;
    }

    EvoConfig evo_config(std::uint64_t replicate_seed) const {
        EvoConfig c;
        c.pop_size = pop_size;
        c.generations = generations;
        c.episode_steps = episode_steps;
        c.record_interval = resolved_record_interval();
        c.mode = ga_mode;
        c.scheme = scheme;
        c.mutation = mutation;
        c.initial_genome_len = initial_genome_len;
        c.initial_codon_pairs = initial_codon_pairs;
        c.seed = replicate_seed;
        return c;
    }

    TrainConfig train_config(std::uint64_t replicate_seed) const {
        TrainConfig c;
        c.alpha = alpha;
        c.gamma = gamma;
        c.epsilon0 = epsilon0;
        c.epsilon_decay = epsilon_decay;
        c.epochs = epochs;
        c.steps_per_epoch = steps_per_epoch;
        c.replay_sample = replay_sample;
        c.replay_capacity = replay_capacity;
        c.prune_age = prune_age;
        c.mode = ql_mode;
        c.scheme = scheme;
        c.reward_timing = reward_timing;
        c.aliased_identity = aliased_identity;
        c.seed = replicate_seed;
        return c;
    }
};

namespace detail {

inline bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

inline long long parse_ll(const std::string& v) {
    std::size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("expected an integer, got '" + v + "'");
    return x;
}

inline double parse_dbl(const std::string& v) {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("expected a number, got '" + v + "'");
    return x;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

} // namespace detail

// One `key = value` assignment. Throws std::invalid_argument on bad values;
// returns false for unknown keys (caller attaches the line number).
inline bool apply_config_key(ExperimentConfig& cfg, const std::string& key,
                             const std::string& value) {
    using detail::parse_bool;
    using detail::parse_dbl;
    using detail::parse_ll;
    if (key == "pipeline") {
        if (value == "ga") cfg.pipeline = Pipeline::GA;
        else if (value == "ql" || value == "qlearning") cfg.pipeline = Pipeline::QLearning;
        else throw std::invalid_argument("pipeline must be 'ga' or 'ql'");
    } else if (key == "mode") {
        // pipeline-dependent: accept either vocabulary and set both
        if (value == "group" || value == "inclusive") cfg.ga_mode = selection_mode_from(value);
        else cfg.ql_mode = controller_mode_from(value);
    } else if (key == "scheme") {
        cfg.scheme = reward_scheme_from(value);
    } else if (key == "replicates") {
        cfg.replicates = static_cast<int>(parse_ll(value));
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_ll(value));
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "condition") {
        cfg.condition = value;
    } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(parse_ll(value));
    } else if (key == "pop_size") {
        cfg.pop_size = static_cast<int>(parse_ll(value));
    } else if (key == "generations") {
        cfg.generations = static_cast<int>(parse_ll(value));
    } else if (key == "episode_steps") {
        cfg.episode_steps = static_cast<int>(parse_ll(value));
    } else if (key == "record_interval") {
        cfg.record_interval = static_cast<int>(parse_ll(value));
    } else if (key == "point_rate") {
        cfg.mutation.point_rate = parse_dbl(value);
    } else if (key == "duplication_rate") {
        cfg.mutation.duplication_rate = parse_dbl(value);
    } else if (key == "deletion_rate") {
        cfg.mutation.deletion_rate = parse_dbl(value);
    } else if (key == "min_len") {
        cfg.mutation.min_len = static_cast<std::size_t>(parse_ll(value));
    } else if (key == "max_len") {
        cfg.mutation.max_len = static_cast<std::size_t>(parse_ll(value));
    } else if (key == "initial_genome_len") {
        cfg.initial_genome_len = static_cast<std::size_t>(parse_ll(value));
    } else if (key == "initial_codon_pairs") {
        cfg.initial_codon_pairs = static_cast<int>(parse_ll(value));
    } else if (key == "epochs") {
        cfg.epochs = static_cast<int>(parse_ll(value));
    } else if (key == "steps_per_epoch") {
        cfg.steps_per_epoch = static_cast<int>(parse_ll(value));
    } else if (key == "alpha") {
        cfg.alpha = parse_dbl(value);
    } else if (key == "gamma") {
        cfg.gamma = parse_dbl(value);
    } else if (key == "epsilon0") {
        cfg.epsilon0 = parse_dbl(value);
    } else if (key == "epsilon_decay") {
        cfg.epsilon_decay = parse_dbl(value);
    } else if (key == "replay_sample") {
        cfg.replay_sample = static_cast<int>(parse_ll(value));
    } else if (key == "replay_capacity") {
        cfg.replay_capacity = static_cast<std::size_t>(parse_ll(value));
    } else if (key == "prune_age") {
        cfg.prune_age = parse_ll(value);
    } else if (key == "reward_timing") {
        if (value == "step") cfg.reward_timing = RewardTiming::PerStep;
        else if (value == "episode") cfg.reward_timing = RewardTiming::PerEpisode;
        else throw std::invalid_argument("reward_timing must be 'step' or 'episode'");
    } else if (key == "centralized_identity") {
        if (value == "distinct") cfg.aliased_identity = false;
        else if (value == "aliased") cfg.aliased_identity = true;
        else throw std::invalid_argument("centralized_identity must be 'distinct' or 'aliased'");
    } else {
        return false;
    }
    return true;
}

// Plain-text config: one `key = value` per line, '#' starts a comment.
// Errors carry the file name and line number.
inline ExperimentConfig parse_config_text(const std::string& text, const std::string& filename) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string s = detail::trim(line);
        if (s.empty()) continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(filename + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = detail::trim(s.substr(0, eq));
        std::string value = detail::trim(s.substr(eq + 1));
        try {
            if (!apply_config_key(cfg, key, value))
                throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(filename + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

// Scale presets: desk profiles finish in minutes, `paper` is the full-size
// experiment. ql-desk also compresses the exploration schedule so epsilon
// ends the shorter run where the full run ends it (0.995^2000 ~ 0.999^10000);
// without that the desk run stops mid-exploration and policies never settle.
inline void apply_profile(ExperimentConfig& cfg, const std::string& profile) {
    if (profile == "ga-desk") {
        cfg.pipeline = Pipeline::GA;
        cfg.generations = 2000;
        cfg.replicates = 10;
    } else if (profile == "ql-desk") {
        cfg.pipeline = Pipeline::QLearning;
        cfg.epochs = 2000;
        cfg.replicates = 10;
        cfg.epsilon_decay = 0.995;
    } else if (profile == "paper") {
        cfg.generations = 50000;
        cfg.epochs = 10000;
        cfg.replicates = 40;
        cfg.epsilon_decay = 0.999;
    } else {
        throw ConfigError("unknown profile '" + profile +
                          "' (expected ga-desk, ql-desk, or paper)");
    }
}

inline void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ConfigError("config error: " + msg); };
    if (cfg.replicates < 1) fail("replicates must be >= 1");
    if (cfg.jobs < 1) fail("jobs must be >= 1");
    if (cfg.pop_size <= 0 || cfg.pop_size % 4 != 0)
        fail("pop_size must be a positive multiple of 4");
    if (cfg.generations < 0) fail("generations must be >= 0");
    if (cfg.episode_steps < 0) fail("episode_steps must be >= 0");
    if (cfg.record_interval < 0) fail("record_interval must be >= 0");
    if (cfg.mutation.point_rate < 0 || cfg.mutation.point_rate > 1)
        fail("point_rate must be in [0,1]");
    if (cfg.mutation.duplication_rate < 0 || cfg.mutation.duplication_rate > 1)
        fail("duplication_rate must be in [0,1]");
    if (cfg.mutation.deletion_rate < 0 || cfg.mutation.deletion_rate > 1)
        fail("deletion_rate must be in [0,1]");
    if (cfg.mutation.min_len < 2) fail("min_len must be >= 2");
    if (cfg.mutation.min_len > cfg.mutation.max_len) fail("min_len must be <= max_len");
    if (cfg.initial_genome_len < cfg.mutation.min_len ||
        cfg.initial_genome_len > cfg.mutation.max_len)
        fail("initial_genome_len must lie within [min_len, max_len]");
    if (cfg.epochs < 0) fail("epochs must be >= 0");
    if (cfg.steps_per_epoch < 0) fail("steps_per_epoch must be >= 0");
    if (cfg.alpha < 0 || cfg.alpha > 1) fail("alpha must be in [0,1]");
    if (cfg.gamma < 0 || cfg.gamma > 1) fail("gamma must be in [0,1]");
    if (cfg.epsilon0 < 0 || cfg.epsilon0 > 1) fail("epsilon0 must be in [0,1]");
    if (cfg.epsilon_decay < 0 || cfg.epsilon_decay > 1) fail("epsilon_decay must be in [0,1]");
    if (cfg.replay_sample < 0) fail("replay_sample must be >= 0");
    if (cfg.replay_capacity < 1) fail("replay_capacity must be >= 1");
    if (cfg.prune_age < 1) fail("prune_age must be >= 1");
}

// Resolved key=value view, also used by the run manifest.
inline std::string describe_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "pipeline=" << to_string(cfg.pipeline) << "\n";
    os << "condition=" << cfg.condition_label() << "\n";
    os << "scheme=" << to_string(cfg.scheme) << "\n";
    if (cfg.pipeline == Pipeline::GA) {
        os << "mode=" << to_string(cfg.ga_mode) << "\n";
        os << "pop_size=" << cfg.pop_size << "\n";
        os << "generations=" << cfg.generations << "\n";
        os << "episode_steps=" << cfg.episode_steps << "\n";
        os << "record_interval=" << cfg.resolved_record_interval() << "\n";
        os << "point_rate=" << fmt_double(cfg.mutation.point_rate) << "\n";
        os << "duplication_rate=" << fmt_double(cfg.mutation.duplication_rate) << "\n";
        os << "deletion_rate=" << fmt_double(cfg.mutation.deletion_rate) << "\n";
        os << "min_len=" << cfg.mutation.min_len << "\n";
        os << "max_len=" << cfg.mutation.max_len << "\n";
        os << "initial_genome_len=" << cfg.initial_genome_len << "\n";
        os << "initial_codon_pairs=" << cfg.initial_codon_pairs << "\n";
    } else {
        os << "mode=" << to_string(cfg.ql_mode) << "\n";
        os << "epochs=" << cfg.epochs << "\n";
        os << "steps_per_epoch=" << cfg.steps_per_epoch << "\n";
        os << "record_interval=" << cfg.resolved_record_interval() << "\n";
        os << "alpha=" << fmt_double(cfg.alpha) << "\n";
        os << "gamma=" << fmt_double(cfg.gamma) << "\n";
        os << "epsilon0=" << fmt_double(cfg.epsilon0) << "\n";
        os << "epsilon_decay=" << fmt_double(cfg.epsilon_decay) << "\n";
        os << "replay_sample=" << cfg.replay_sample << "\n";
        os << "replay_capacity=" << cfg.replay_capacity << "\n";
        os << "prune_age=" << cfg.prune_age << "\n";
        os << "reward_timing="
           << (cfg.reward_timing == RewardTiming::PerStep ? "step" : "episode") << "\n";
        os << "centralized_identity=" << (cfg.aliased_identity ? "aliased" : "distinct") << "\n";
    }
    os << "replicates=" << cfg.replicates << "\n";
    os << "seed=" << cfg.seed << "\n";
    os << "jobs=" << cfg.jobs << "\n";
    return os.str();
}

} // namespace forage
