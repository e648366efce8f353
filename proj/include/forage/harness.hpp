#pragma once

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include "forage/config.hpp"
#include "forage/csv.hpp"
#include "forage/evolution.hpp"
#include "forage/qlearning.hpp"
#include "forage/stats.hpp"
#include "forage/svg.hpp"

namespace forage {

inline constexpr int kArtifactVersion = 1;

// One recording point of one replicate's learning curve.
struct CurvePoint {
    int step = 0; // generation or epoch
    double group_food = 0.0;
};

struct ReplicateResult {
    std::uint64_t seed = 0;
    std::vector<CurvePoint> curve;
    std::array<double, 4> final_ranks{}; // best-first
    double final_group_food = 0.0;
    double flatness = 0.0;
};

struct RunResult {
    ExperimentConfig config;
    std::vector<ReplicateResult> replicates;
    std::filesystem::path dir;
};

namespace detail {

inline ReplicateResult run_ga_replicate(const ExperimentConfig& cfg, std::uint64_t seed) {
    ReplicateResult r;
    r.seed = seed;
    EvolutionResult evo = run_evolution(cfg.evo_config(seed));
    for (const GenRecord& rec : evo.records)
        r.curve.push_back({rec.generation, rec.mean_group_food});
    if (!evo.records.empty()) r.final_ranks = evo.records.back().rank_means;
    r.final_group_food =
        r.final_ranks[0] + r.final_ranks[1] + r.final_ranks[2] + r.final_ranks[3];
    r.flatness = despotic_flatness(r.final_ranks);
    return r;
}

inline ReplicateResult run_ql_replicate(const ExperimentConfig& cfg, std::uint64_t seed) {
    ReplicateResult r;
    r.seed = seed;
    TrainingResult train = run_training(cfg.train_config(seed));
    int interval = cfg.resolved_record_interval();
    for (const EpochRecord& rec : train.records) {
        if (rec.epoch % interval == 0 || rec.epoch == cfg.epochs - 1)
            r.curve.push_back(
                {rec.epoch, static_cast<double>(rec.food[0] + rec.food[1] + rec.food[2] +
                                                rec.food[3])});
    }
    std::array<double, 4> greedy{static_cast<double>(train.greedy_food[0]),
                                 static_cast<double>(train.greedy_food[1]),
                                 static_cast<double>(train.greedy_food[2]),
                                 static_cast<double>(train.greedy_food[3])};
    r.final_ranks = rank_sort(greedy);
    r.final_group_food = greedy[0] + greedy[1] + greedy[2] + greedy[3];
    r.flatness = despotic_flatness(r.final_ranks);
    return r;
}

inline std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

} // namespace detail

// Executes every replicate of one condition and writes the run directory:
// manifest.txt, curves.csv, ranks.csv, summary.csv. Workers only fill
// per-replicate slots; all files are written by the caller thread
// afterwards, so the worker count never changes a byte of output.
inline RunResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.out.empty()) throw ConfigError("config error: no output directory set");

    std::filesystem::path dir(cfg.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());

    std::string started = detail::iso_timestamp();

    RunResult result;
    result.config = cfg;
    result.dir = dir;
    result.replicates.resize(static_cast<std::size_t>(cfg.replicates));

    auto run_one = [&](int rep) {
        std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
        result.replicates[static_cast<std::size_t>(rep)] =
            (cfg.pipeline == Pipeline::GA) ? detail::run_ga_replicate(cfg, seed)
                                           : detail::run_ql_replicate(cfg, seed);
    };

    int workers = std::min(cfg.jobs, cfg.replicates);
    if (workers <= 1) {
        for (int rep = 0; rep < cfg.replicates; ++rep) run_one(rep);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int rep = next.fetch_add(1); rep < cfg.replicates;
                     rep = next.fetch_add(1))
                    run_one(rep);
            });
        for (auto& t : pool) t.join();
    }

    {
        auto out = detail::open_output(dir / "curves.csv");
        out << "replicate,step,group_food\n";
        for (int rep = 0; rep < cfg.replicates; ++rep)
            for (const CurvePoint& p : result.replicates[static_cast<std::size_t>(rep)].curve)
                out << rep << "," << p.step << "," << fmt_double(p.group_food) << "\n";
    }
    {
        auto out = detail::open_output(dir / "ranks.csv");
        out << "replicate,rank1,rank2,rank3,rank4\n";
        for (int rep = 0; rep < cfg.replicates; ++rep) {
            const auto& r = result.replicates[static_cast<std::size_t>(rep)];
            out << rep;
            for (int k = 0; k < 4; ++k)
                out << "," << fmt_double(r.final_ranks[static_cast<std::size_t>(k)]);
            out << "\n";
        }
    }
    {
        std::vector<double> foods, flats;
        std::array<std::vector<double>, 4> ranks;
        for (const auto& r : result.replicates) {
            foods.push_back(r.final_group_food);
            flats.push_back(r.flatness);
            for (int k = 0; k < 4; ++k)
                ranks[static_cast<std::size_t>(k)].push_back(
                    r.final_ranks[static_cast<std::size_t>(k)]);
        }
        auto out = detail::open_output(dir / "summary.csv");
        out << "condition,n,group_food_mean,group_food_ci95";
        for (int k = 1; k <= 4; ++k)
            out << ",rank" << k << "_mean,rank" << k << "_ci95";
        out << ",flatness_mean,flatness_ci95\n";
        out << cfg.condition_label() << "," << cfg.replicates;
        auto emit = [&](const std::vector<double>& xs) {
            if (xs.size() >= 2) {
                auto [m, ci] = mean_ci95(xs);
                out << "," << fmt_double(m) << "," << fmt_double(ci);
            } else {
                out << "," << fmt_double(xs.empty() ? 0.0 : xs[0]) << ",0";
            }
        };
        emit(foods);
        for (int k = 0; k < 4; ++k) emit(ranks[static_cast<std::size_t>(k)]);
        emit(flats);
        out << "\n";
    }
    {
        auto out = detail::open_output(dir / "manifest.txt");
        out << "artifact_version=" << kArtifactVersion << "\n";
        out << describe_config(cfg);
        out << "replicate_seeds=";
        for (int rep = 0; rep < cfg.replicates; ++rep)
            out << (rep ? " " : "") << cfg.seed + static_cast<std::uint64_t>(rep);
        out << "\n";
        out << "wall_clock_start=" << started << "\n";
        out << "wall_clock_end=" << detail::iso_timestamp() << "\n";
    }
    return result;
}

// A run directory read back for comparison.
struct LoadedRun {
    std::string condition;
    std::string pipeline;
    std::filesystem::path dir;
    std::vector<double> final_group_food;          // one per replicate
    std::vector<std::array<double, 4>> final_ranks; // one per replicate
};

inline LoadedRun load_run(const std::filesystem::path& dir) {
    LoadedRun run;
    run.dir = dir;
    std::ifstream manifest(dir / "manifest.txt");
    if (!manifest) throw IoError("not a run directory (missing manifest.txt): " + dir.string());
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.rfind("condition=", 0) == 0) run.condition = line.substr(10);
        if (line.rfind("pipeline=", 0) == 0) run.pipeline = line.substr(9);
    }
    auto rows = read_csv((dir / "ranks.csv").string());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 5) throw IoError("malformed ranks.csv in " + dir.string());
        std::array<double, 4> ranks{parse_double(row[1]), parse_double(row[2]),
                                    parse_double(row[3]), parse_double(row[4])};
        run.final_ranks.push_back(ranks);
        run.final_group_food.push_back(ranks[0] + ranks[1] + ranks[2] + ranks[3]);
    }
    if (run.final_ranks.empty()) throw IoError("no replicates in " + dir.string());
    return run;
}

struct PairwiseKs {
    std::string a;
    std::string b;
    KsResult ks;
    bool significant = false;
};

struct CompareResult {
    std::vector<PairwiseKs> pairs;
    int m = 0;
    std::vector<std::string> warnings;
};

// Pairwise two-sample KS over the runs' final group-food distributions with
// a Bonferroni threshold of 0.01/m (m = number of comparisons). Writes
// significance.csv plus figure-style SVGs into `out_dir`.
inline CompareResult compare_runs(const std::vector<std::filesystem::path>& run_dirs,
                                  const std::filesystem::path& out_dir) {
    if (run_dirs.size() < 2)
        throw ConfigError("compare needs at least 2 run directories");
    std::vector<LoadedRun> runs;
    runs.reserve(run_dirs.size());
    for (const auto& d : run_dirs) runs.push_back(load_run(d));

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    CompareResult result;
    for (std::size_t i = 0; i < runs.size(); ++i)
        for (std::size_t j = i + 1; j < runs.size(); ++j) {
            if (runs[i].pipeline != runs[j].pipeline)
                result.warnings.push_back("comparing different pipelines: " +
                                          runs[i].condition + " (" + runs[i].pipeline + ") vs " +
                                          runs[j].condition + " (" + runs[j].pipeline + ")");
            PairwiseKs p;
            p.a = runs[i].condition;
            p.b = runs[j].condition;
            p.ks = ks_2samp(runs[i].final_group_food, runs[j].final_group_food);
            result.pairs.push_back(p);
        }
    result.m = static_cast<int>(result.pairs.size());
    for (auto& p : result.pairs) p.significant = bonferroni_significant(p.ks.p, result.m);

    {
        auto out = detail::open_output(out_dir / "significance.csv");
        out << "a,b,d,p,m,significant\n";
        for (const auto& p : result.pairs)
            out << p.a << "," << p.b << "," << fmt_double(p.ks.d) << "," << fmt_double(p.ks.p)
                << "," << result.m << "," << (p.significant ? "true" : "false") << "\n";
    }
    {
        std::vector<BarDatum> bars;
        for (const auto& run : runs) {
            BarDatum b;
            b.label = run.condition;
            if (run.final_group_food.size() >= 2) {
                auto [m, ci] = mean_ci95(run.final_group_food);
                b.mean = m;
                b.ci = ci;
            } else {
                b.mean = run.final_group_food[0];
            }
            bars.push_back(b);
        }
        auto out = detail::open_output(out_dir / "group_food.svg");
        out << render_bar_chart(bars, "final group food by condition", "food collected");
    }
    {
        std::vector<RankSeries> series;
        for (const auto& run : runs) {
            RankSeries s;
            s.label = run.condition;
            for (int k = 0; k < 4; ++k) {
                std::vector<double> xs;
                for (const auto& ranks : run.final_ranks)
                    xs.push_back(ranks[static_cast<std::size_t>(k)]);
                if (xs.size() >= 2) {
                    auto [m, ci] = mean_ci95(xs);
                    s.means[static_cast<std::size_t>(k)] = m;
                    s.ci[static_cast<std::size_t>(k)] = ci;
                } else {
                    s.means[static_cast<std::size_t>(k)] = xs[0];
                }
            }
            series.push_back(s);
        }
        auto out = detail::open_output(out_dir / "rank_curves.svg");
        out << render_rank_chart(series, "per-agent food by rank");
    }
    {
        auto out = detail::open_output(out_dir / "manifest.txt");
        out << "artifact_version=" << kArtifactVersion << "\n";
        out << "comparisons=" << result.m << "\n";
        for (const auto& run : runs) out << "run=" << run.dir.string() << "\n";
        for (const auto& w : result.warnings) out << "warning=" << w << "\n";
        out << "wall_clock=" << detail::iso_timestamp() << "\n";
    }
    return result;
}

} // namespace forage
