#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "forage/markov_brain.hpp"
#include "forage/reward.hpp"
#include "forage/rng.hpp"
#include "forage/stats.hpp"

namespace forage {

// How groups of four are assembled each generation:
//   GroupLevel      - every member is evaluated in a group of 4 clones of
//                     itself and credited once with the group score.
//   InclusiveFitness - four shuffle-and-partition passes over the
//                     population; each member is evaluated in 4 random
//                     groups and credited with the mean of the 4 scores.
enum class SelectionMode { GroupLevel, InclusiveFitness };

inline std::string to_string(SelectionMode m) {
    return m == SelectionMode::GroupLevel ? "group" : "inclusive";
}

inline SelectionMode selection_mode_from(const std::string& name) {
    if (name == "group" || name == "group-level" || name == "clonal") return SelectionMode::GroupLevel;
    if (name == "inclusive" || name == "random") return SelectionMode::InclusiveFitness;
    throw std::invalid_argument("unknown selection mode: " + name);
}

struct EvoConfig {
    int pop_size = 100; // must be divisible by 4
    int generations = 50000;
    int episode_steps = 256;
    int record_interval = 100;
    SelectionMode mode = SelectionMode::GroupLevel;
    RewardScheme scheme = RewardScheme::Minimum;
    MutationConfig mutation{};
    std::size_t initial_genome_len = 5000;
    int initial_codon_pairs = 16;
    std::uint64_t seed = 1;
};

struct Population {
    std::vector<Genome> members;
    std::vector<double> fitness;
};

struct GenRecord {
    int generation = 0;
    double mean_group_food = 0.0;      // mean over groups of the 4-agent food sum
    std::array<double, 4> rank_means{}; // mean per-agent food by rank, best first
};

struct EvolutionResult {
    std::vector<GenRecord> records;
    Population final_population;
};

using Group = std::array<int, 4>;

inline std::vector<Group> form_groups(int pop_size, SelectionMode mode, Rng& rng) {
    if (pop_size <= 0 || pop_size % 4 != 0)
        throw std::invalid_argument("population size must be a positive multiple of 4");
    std::vector<Group> groups;
    if (mode == SelectionMode::GroupLevel) {
        groups.reserve(static_cast<std::size_t>(pop_size));
        for (int i = 0; i < pop_size; ++i) groups.push_back({i, i, i, i});
        return groups;
    }
    groups.reserve(static_cast<std::size_t>(pop_size));
    std::vector<int> order(static_cast<std::size_t>(pop_size));
    for (int pass = 0; pass < 4; ++pass) {
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t k = order.size(); k > 1; --k)
            std::swap(order[k - 1], order[rng.index(k)]);
        for (int g = 0; g < pop_size / 4; ++g)
            groups.push_back({order[static_cast<std::size_t>(4 * g)],
                              order[static_cast<std::size_t>(4 * g + 1)],
                              order[static_cast<std::size_t>(4 * g + 2)],
                              order[static_cast<std::size_t>(4 * g + 3)]});
    }
    return groups;
}

namespace detail {

// Fitness-proportional pick given a pre-drawn u in [0, total).
inline std::size_t roulette_index(const std::vector<double>& fitness, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        acc += fitness[i];
        if (u < acc) return i;
    }
    return fitness.size() - 1; // u == total can only happen through rounding
}

} // namespace detail

inline std::size_t roulette_select(const std::vector<double>& fitness, Rng& rng) {
    assert(!fitness.empty());
    double total = 0.0;
    for (double f : fitness) {
        assert(f >= 0.0);
        total += f;
    }
    if (total <= 0.0) return rng.index(fitness.size());
    return detail::roulette_index(fitness, rng.real_in(0.0, total));
}

struct GenerationEval {
    std::vector<double> fitness;
    double mean_group_food = 0.0;
    std::array<double, 4> rank_means{};
};

// Evaluates one generation: forms groups, runs one fresh-world episode per
// group on a child RNG keyed by (seed, generation, group), aggregates with
// the reward scheme, and credits members. Group statistics for the records
// come from the same episodes.
inline GenerationEval evaluate_generation(const Population& pop, const EvoConfig& cfg,
                                          int generation, Rng& rng) {
    const auto groups = form_groups(cfg.pop_size, cfg.mode, rng);

    std::vector<Brain> decoded;
    decoded.reserve(pop.members.size());
    for (const Genome& g : pop.members) decoded.push_back(decode(g));

    GenerationEval out;
    out.fitness.assign(pop.members.size(), 0.0);
    double food_sum = 0.0;
    std::array<double, 4> rank_sum{};

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        Rng episode_rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(generation), gi));
        ForageWorld world;
        std::array<Brain, 4> brains;
        for (int k = 0; k < 4; ++k) {
            brains[static_cast<std::size_t>(k)] =
                decoded[static_cast<std::size_t>(groups[gi][static_cast<std::size_t>(k)])];
            brains[static_cast<std::size_t>(k)].reset();
        }
        auto totals = run_forage_episode(world, brains, cfg.episode_steps, episode_rng);
        std::array<double, 4> collected = {static_cast<double>(totals[0]),
                                           static_cast<double>(totals[1]),
                                           static_cast<double>(totals[2]),
                                           static_cast<double>(totals[3])};
        double score = scheme_reward(collected, cfg.scheme);

        if (cfg.mode == SelectionMode::GroupLevel) {
            // clonal group: only the original member is credited
            out.fitness[gi] = score;
        } else {
            for (int k = 0; k < 4; ++k)
                out.fitness[static_cast<std::size_t>(groups[gi][static_cast<std::size_t>(k)])] +=
                    score / 4.0;
        }

        food_sum += collected[0] + collected[1] + collected[2] + collected[3];
        auto ranked = rank_sort(collected);
        for (int r = 0; r < 4; ++r) rank_sum[static_cast<std::size_t>(r)] += ranked[static_cast<std::size_t>(r)];
    }

    const double n_groups = static_cast<double>(groups.size());
    out.mean_group_food = food_sum / n_groups;
    for (int r = 0; r < 4; ++r)
        out.rank_means[static_cast<std::size_t>(r)] = rank_sum[static_cast<std::size_t>(r)] / n_groups;
    return out;
}

// The generational loop: evaluate, record at the configured interval (plus
// the final generation), then rebuild the population from roulette draws
// with each offspring mutated. Reproduction is asexual.
inline EvolutionResult run_evolution(const EvoConfig& cfg) {
    if (cfg.pop_size <= 0 || cfg.pop_size % 4 != 0)
        throw std::invalid_argument("population size must be a positive multiple of 4");
    Rng rng(cfg.seed);

    EvolutionResult result;
    Population& pop = result.final_population;
    pop.members.reserve(static_cast<std::size_t>(cfg.pop_size));
    for (int i = 0; i < cfg.pop_size; ++i)
        pop.members.push_back(random_genome(cfg.initial_genome_len, cfg.initial_codon_pairs, rng));
    pop.fitness.assign(static_cast<std::size_t>(cfg.pop_size), 0.0);

    const int interval = std::max(1, cfg.record_interval);
    for (int gen = 0; gen < cfg.generations; ++gen) {
        GenerationEval eval = evaluate_generation(pop, cfg, gen, rng);
        pop.fitness = eval.fitness;

        if (gen % interval == 0 || gen == cfg.generations - 1)
            result.records.push_back({gen, eval.mean_group_food, eval.rank_means});

        std::vector<Genome> next;
        next.reserve(pop.members.size());
        for (int k = 0; k < cfg.pop_size; ++k) {
            std::size_t parent = roulette_select(pop.fitness, rng);
            next.push_back(mutate(pop.members[parent], cfg.mutation, rng));
        }
        pop.members = std::move(next);
    }
    return result;
}

// Checkpoint: population genomes plus RNG state, little-endian binary with
// a versioned header.
inline constexpr char kEvoCheckpointMagic[4] = {'F', 'E', 'V', 'C'};
inline constexpr std::uint32_t kEvoCheckpointVersion = 1;

inline void save_checkpoint(std::ostream& os, const Population& pop, const Rng& rng) {
    os.write(kEvoCheckpointMagic, 4);
    std::uint32_t ver = kEvoCheckpointVersion;
    os.write(reinterpret_cast<const char*>(&ver), sizeof ver);
    std::uint64_t n = pop.members.size();
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    for (const Genome& g : pop.members) {
        std::uint64_t len = g.sites.size();
        os.write(reinterpret_cast<const char*>(&len), sizeof len);
        os.write(reinterpret_cast<const char*>(g.sites.data()), static_cast<std::streamsize>(len));
    }
    for (const double f : pop.fitness) os.write(reinterpret_cast<const char*>(&f), sizeof f);
    std::string state = rng.save_state();
    std::uint64_t slen = state.size();
    os.write(reinterpret_cast<const char*>(&slen), sizeof slen);
    os.write(state.data(), static_cast<std::streamsize>(slen));
}

inline bool load_checkpoint(std::istream& is, Population& pop, Rng& rng) {
    char magic[4];
    std::uint32_t ver = 0;
    if (!is.read(magic, 4) || std::string(magic, 4) != std::string(kEvoCheckpointMagic, 4))
        return false;
    if (!is.read(reinterpret_cast<char*>(&ver), sizeof ver) || ver != kEvoCheckpointVersion)
        return false;
    std::uint64_t n = 0;
    if (!is.read(reinterpret_cast<char*>(&n), sizeof n)) return false;
    pop.members.assign(n, Genome{});
    for (auto& g : pop.members) {
        std::uint64_t len = 0;
        if (!is.read(reinterpret_cast<char*>(&len), sizeof len)) return false;
        g.sites.resize(len);
        if (!is.read(reinterpret_cast<char*>(g.sites.data()), static_cast<std::streamsize>(len)))
            return false;
    }
    pop.fitness.assign(n, 0.0);
    for (auto& f : pop.fitness)
        if (!is.read(reinterpret_cast<char*>(&f), sizeof f)) return false;
    std::uint64_t slen = 0;
    if (!is.read(reinterpret_cast<char*>(&slen), sizeof slen)) return false;
    std::string state(slen, '\0');
    if (!is.read(state.data(), static_cast<std::streamsize>(slen))) return false;
    rng.load_state(state);
    return true;
}

} // namespace forage
