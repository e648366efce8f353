#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "forage/evolution.hpp"

using namespace forage;

TEST_CASE("aggregate_rewards") {
    CHECK(aggregate_rewards({3, 5, 2, 8}, RewardScheme::Mean) ==
          std::array<double, 4>{4.5, 4.5, 4.5, 4.5});
    CHECK(aggregate_rewards({3, 5, 2, 8}, RewardScheme::Minimum) ==
          std::array<double, 4>{2, 2, 2, 2});
    CHECK(aggregate_rewards({0, 0, 0, 0}, RewardScheme::Maximum) ==
          std::array<double, 4>{0, 0, 0, 0});
}

TEST_CASE("reward scheme lattice and permutation invariance") {
    Rng rng(17);
    for (int it = 0; it < 2000; ++it) {
        std::array<double, 4> v = {rng.real_in(0, 50), rng.real_in(0, 50), rng.real_in(0, 50),
                                   rng.real_in(0, 50)};
        double lo = scheme_reward(v, RewardScheme::Minimum);
        double mid = scheme_reward(v, RewardScheme::Mean);
        double hi = scheme_reward(v, RewardScheme::Maximum);
        REQUIRE(lo <= mid);
        REQUIRE(mid <= hi);
        std::array<double, 4> shuffled = {v[2], v[0], v[3], v[1]};
        REQUIRE(scheme_reward(shuffled, RewardScheme::Minimum) == lo);
        REQUIRE(scheme_reward(shuffled, RewardScheme::Maximum) == hi);
        REQUIRE(scheme_reward(shuffled, RewardScheme::Mean) == Catch::Approx(mid).margin(1e-12));
    }
}

TEST_CASE("form_groups: clonal groups") {
    Rng rng(1);
    auto groups = form_groups(100, SelectionMode::GroupLevel, rng);
    REQUIRE(groups.size() == 100);
    for (int i = 0; i < 100; ++i)
        CHECK(groups[static_cast<std::size_t>(i)] == Group{i, i, i, i});
}

TEST_CASE("form_groups: inclusive fitness covers everyone exactly 4 times") {
    Rng rng(2);
    auto g8 = form_groups(8, SelectionMode::InclusiveFitness, rng);
    CHECK(g8.size() == 8);
    auto g100 = form_groups(100, SelectionMode::InclusiveFitness, rng);
    CHECK(g100.size() == 100);
    std::map<int, int> seen;
    for (const auto& g : g100)
        for (int idx : g) seen[idx]++;
    REQUIRE(seen.size() == 100);
    for (const auto& [idx, count] : seen) CHECK(count == 4);
    // each of the 4 passes is itself a partition
    for (int pass = 0; pass < 4; ++pass) {
        std::map<int, int> pass_seen;
        for (int gi = pass * 25; gi < (pass + 1) * 25; ++gi)
            for (int idx : g100[static_cast<std::size_t>(gi)]) pass_seen[idx]++;
        REQUIRE(pass_seen.size() == 100);
    }
}

TEST_CASE("form_groups rejects bad sizes") {
    Rng rng(3);
    CHECK_THROWS_AS(form_groups(10, SelectionMode::InclusiveFitness, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(form_groups(0, SelectionMode::GroupLevel, rng), std::invalid_argument);
}

TEST_CASE("roulette_select follows cumulative fitness") {
    CHECK(detail::roulette_index({0, 0, 1}, 0.5) == 2);
    CHECK(detail::roulette_index({1, 1}, 0.6 * 2.0) == 1);
    CHECK(detail::roulette_index({1, 1}, 0.3 * 2.0) == 0);

    Rng rng(4);
    for (int it = 0; it < 200; ++it) CHECK(roulette_select({0, 0, 1}, rng) == 2);
}

TEST_CASE("roulette_select: zero total falls back to uniform") {
    Rng rng(5);
    std::array<int, 4> hits{};
    for (int it = 0; it < 8000; ++it) hits[roulette_select({0, 0, 0, 0}, rng)]++;
    for (int h : hits) CHECK(h > 1700);
}

TEST_CASE("roulette_select converges to fitness proportions") {
    Rng rng(6);
    std::vector<double> fitness = {1, 2, 3, 4};
    std::array<double, 4> hits{};
    const int draws = 40000;
    for (int it = 0; it < draws; ++it) hits[roulette_select(fitness, rng)] += 1.0;
    double chi2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        double expected = draws * fitness[static_cast<std::size_t>(i)] / 10.0;
        chi2 += (hits[static_cast<std::size_t>(i)] - expected) *
                (hits[static_cast<std::size_t>(i)] - expected) / expected;
    }
    CHECK(chi2 < 16.27); // chi-square 3 dof, p = 0.001
}

namespace {

EvoConfig tiny_config(std::uint64_t seed) {
    EvoConfig cfg;
    cfg.pop_size = 16;
    cfg.generations = 6;
    cfg.episode_steps = 32;
    cfg.record_interval = 2;
    cfg.initial_genome_len = 1200;
    cfg.mutation.min_len = 1000;
    cfg.mutation.max_len = 4000;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("evaluate_generation: gate-free population scores zero") {
    EvoConfig cfg = tiny_config(1);
    cfg.initial_codon_pairs = 0;
    Population pop;
    Rng init(1);
    for (int i = 0; i < cfg.pop_size; ++i) {
        Genome g;
        g.sites.assign(cfg.initial_genome_len, 1); // no codons
        pop.members.push_back(g);
    }
    Rng rng(2);
    auto eval = evaluate_generation(pop, cfg, 0, rng);
    for (double f : eval.fitness) CHECK(f == 0.0);
    CHECK(eval.mean_group_food == 0.0);
}

TEST_CASE("evaluate_generation is deterministic") {
    EvoConfig cfg = tiny_config(3);
    Population pop;
    Rng init(3);
    for (int i = 0; i < cfg.pop_size; ++i)
        pop.members.push_back(random_genome(cfg.initial_genome_len, 8, init));
    Rng r1(9), r2(9);
    auto e1 = evaluate_generation(pop, cfg, 0, r1);
    auto e2 = evaluate_generation(pop, cfg, 0, r2);
    CHECK(e1.fitness == e2.fitness);
    CHECK(e1.mean_group_food == e2.mean_group_food);
    CHECK(e1.rank_means == e2.rank_means);
}

TEST_CASE("run_evolution: zero generations returns the initial population") {
    EvoConfig cfg = tiny_config(4);
    cfg.generations = 0;
    auto result = run_evolution(cfg);
    CHECK(result.records.empty());
    CHECK(result.final_population.members.size() == 16);
}

TEST_CASE("run_evolution is reproducible and keeps population size") {
    auto r1 = run_evolution(tiny_config(5));
    auto r2 = run_evolution(tiny_config(5));
    REQUIRE(r1.records.size() == r2.records.size());
    REQUIRE(r1.records.size() == 4); // generations 0,2,4 plus final 5
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
        CHECK(r1.records[i].generation == r2.records[i].generation);
        CHECK(r1.records[i].mean_group_food == r2.records[i].mean_group_food);
        CHECK(r1.records[i].rank_means == r2.records[i].rank_means);
    }
    CHECK(r1.final_population.members.size() == 16);
    // rank means come sorted
    for (const auto& rec : r1.records)
        for (int k = 0; k < 3; ++k)
            CHECK(rec.rank_means[static_cast<std::size_t>(k)] >=
                  rec.rank_means[static_cast<std::size_t>(k + 1)]);
}

TEST_CASE("inclusive fitness mode runs and stays reproducible") {
    EvoConfig cfg = tiny_config(6);
    cfg.mode = SelectionMode::InclusiveFitness;
    auto r1 = run_evolution(cfg);
    auto r2 = run_evolution(cfg);
    REQUIRE(!r1.records.empty());
    CHECK(r1.records.back().mean_group_food == r2.records.back().mean_group_food);
}

TEST_CASE("evolution checkpoint round-trips") {
    Rng init(12);
    Population pop;
    for (int i = 0; i < 8; ++i) pop.members.push_back(random_genome(1000, 4, init));
    pop.fitness = {1, 2, 3, 4, 5, 6, 7, 8};
    Rng rng(99);
    rng.next_u64();

    std::stringstream ss;
    save_checkpoint(ss, pop, rng);

    Population loaded;
    Rng loaded_rng(0);
    REQUIRE(load_checkpoint(ss, loaded, loaded_rng));
    REQUIRE(loaded.members.size() == pop.members.size());
    for (std::size_t i = 0; i < pop.members.size(); ++i)
        CHECK(loaded.members[i].sites == pop.members[i].sites);
    CHECK(loaded.fitness == pop.fitness);
    CHECK(loaded_rng.next_u64() == rng.next_u64());
}
