#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "forage/rng.hpp"

namespace forage {

struct KsResult {
    double d = 0.0; // sup of |ECDF_a - ECDF_b|
    double p = 1.0;
};

// Per-agent food sorted best-first (rank 1 = highest collector).
inline std::array<double, 4> rank_sort(std::array<double, 4> v) {
    std::stable_sort(v.begin(), v.end(), std::greater<double>{});
    return v;
}

// Scalar inequality index over a rank-sorted 4-vector:
// (top rank - bottom rank) / mean. 0 means perfectly equal shares; the
// all-zero vector is defined as 0.
inline double despotic_flatness(const std::array<double, 4>& ranked) {
    assert(ranked[0] >= ranked[1] && ranked[1] >= ranked[2] && ranked[2] >= ranked[3]);
    double mean = (ranked[0] + ranked[1] + ranked[2] + ranked[3]) / 4.0;
    if (mean == 0.0) return 0.0;
    return (ranked[0] - ranked[3]) / mean;
}

// Sample mean and 95% normal-approximation half-width (1.96 * sd / sqrt(n)).
inline std::pair<double, double> mean_ci95(std::span<const double> samples) {
    std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("mean_ci95 requires at least 2 samples");
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return {mean, 1.96 * sd / std::sqrt(static_cast<double>(n))};
}

namespace detail {

// Survival function of the Kolmogorov distribution,
// Q(lambda) = 2 * sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), truncated at
// k = 100 and clamped to [0, 1].
inline double kolmogorov_q(double lambda) {
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1) ? term : -term;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

} // namespace detail

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
// Q(d * sqrt(nm/(n+m))). Identical samples give d = 0, p = 1.
inline KsResult ks_2samp(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_2samp requires non-empty samples");
    KsResult r;
    r.d = detail::ks_statistic(std::vector<double>(a.begin(), a.end()),
                               std::vector<double>(b.begin(), b.end()));
    if (r.d == 0.0) {
        r.p = 1.0;
        return r;
    }
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    r.p = detail::kolmogorov_q(r.d * std::sqrt(n * m / (n + m)));
    return r;
}

// Permutation fallback for very small samples (the asymptotic p-value is a
// large-sample approximation). p = (1 + #{d_perm >= d_obs}) / (iters + 1).
inline KsResult ks_2samp_perm(std::span<const double> a, std::span<const double> b, Rng& rng,
                              int iters = 10000) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_2samp requires non-empty samples");
    KsResult r;
    std::vector<double> va(a.begin(), a.end()), vb(b.begin(), b.end());
    r.d = detail::ks_statistic(va, vb);
    std::vector<double> pool(va);
    pool.insert(pool.end(), vb.begin(), vb.end());
    int hits = 0;
    for (int it = 0; it < iters; ++it) {
        for (std::size_t k = pool.size(); k > 1; --k) {
            std::size_t j = rng.index(k);
            std::swap(pool[k - 1], pool[j]);
        }
        std::vector<double> pa(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(a.size()));
        std::vector<double> pb(pool.begin() + static_cast<std::ptrdiff_t>(a.size()), pool.end());
        if (detail::ks_statistic(std::move(pa), std::move(pb)) >= r.d) ++hits;
    }
    r.p = static_cast<double>(1 + hits) / static_cast<double>(iters + 1);
    return r;
}

// True iff p clears the Bonferroni-corrected threshold 0.01 / m for m tests.
inline bool bonferroni_significant(double p, int m) {
    if (m < 1) throw std::invalid_argument("bonferroni_significant requires m >= 1");
    return p < 0.01 / static_cast<double>(m);
}

} // namespace forage
