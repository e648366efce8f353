#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "forage/rng.hpp"
#include "forage/stats.hpp"

using namespace forage;

namespace {

// Independent ECDF oracle: evaluate both empirical CDFs at every sample
// point by brute-force counting.
double ks_d_oracle(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> points = a;
    points.insert(points.end(), b.begin(), b.end());
    double d = 0.0;
    for (double x : points) {
        double fa = 0.0, fb = 0.0;
        for (double v : a)
            if (v <= x) fa += 1.0;
        for (double v : b)
            if (v <= x) fb += 1.0;
        fa /= static_cast<double>(a.size());
        fb /= static_cast<double>(b.size());
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

} // namespace

TEST_CASE("rank_sort orders descending, stable for ties") {
    CHECK(rank_sort({2, 8, 5, 3}) == std::array<double, 4>{8, 5, 3, 2});
    CHECK(rank_sort({4, 4, 4, 4}) == std::array<double, 4>{4, 4, 4, 4});
    CHECK(rank_sort({0, 1, 0, 1}) == std::array<double, 4>{1, 1, 0, 0});
}

TEST_CASE("despotic_flatness") {
    CHECK(despotic_flatness({8, 5, 3, 2}) == Catch::Approx(6.0 / 4.5));
    CHECK(despotic_flatness({4, 4, 4, 4}) == 0.0);
    CHECK(despotic_flatness({0, 0, 0, 0}) == 0.0);
}

TEST_CASE("despotic_flatness is scale-invariant") {
    Rng rng(11);
    for (int it = 0; it < 200; ++it) {
        std::array<double, 4> v = {rng.real_in(0, 100), rng.real_in(0, 100),
                                   rng.real_in(0, 100), rng.real_in(0, 100)};
        auto ranked = rank_sort(v);
        if (ranked[0] == 0.0) continue;
        double c = rng.real_in(0.001, 1000.0);
        std::array<double, 4> scaled = ranked;
        for (auto& x : scaled) x *= c;
        CHECK(despotic_flatness(scaled) == Catch::Approx(despotic_flatness(ranked)).margin(1e-12));
    }
}

TEST_CASE("mean_ci95") {
    std::vector<double> flat = {2, 2, 2};
    auto [m0, hw0] = mean_ci95(flat);
    CHECK(m0 == 2.0);
    CHECK(hw0 == 0.0);

    std::vector<double> v = {1, 2, 3};
    auto [m1, hw1] = mean_ci95(v);
    CHECK(m1 == Catch::Approx(2.0));
    CHECK(hw1 == Catch::Approx(1.96 / std::sqrt(3.0)).epsilon(1e-9));

    std::vector<double> one = {5};
    CHECK_THROWS_AS(mean_ci95(one), std::invalid_argument);
}

TEST_CASE("mean_ci95 half-width shrinks as 1/sqrt(n)") {
    // alternating fixed-variance data keeps the sample sd equal across sizes
    auto make = [](std::size_t n) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
        return v;
    };
    auto [m4, hw4] = mean_ci95(make(400));
    auto [m1, hw1] = mean_ci95(make(100));
    (void)m4;
    (void)m1;
    CHECK(hw1 / hw4 == Catch::Approx(2.0).epsilon(0.01));
}

TEST_CASE("ks_2samp matches hand-checked cases") {
    std::vector<double> a = {1, 2, 3};
    auto same = ks_2samp(a, a);
    CHECK(same.d == 0.0);
    CHECK(same.p == 1.0);

    std::vector<double> lo = {0, 0}, hi = {1, 1};
    CHECK(ks_2samp(lo, hi).d == Catch::Approx(1.0));

    // oracle-first: brute-force ECDF over the merged points gives 0.5
    std::vector<double> x = {1, 2}, y = {1.5, 2.5};
    CHECK(ks_d_oracle(x, y) == Catch::Approx(0.5));
    CHECK(ks_2samp(x, y).d == Catch::Approx(0.5));

    CHECK_THROWS_AS(ks_2samp(std::vector<double>{}, a), std::invalid_argument);
}

TEST_CASE("ks_2samp agrees with the brute-force oracle on random samples") {
    Rng rng(202);
    for (int it = 0; it < 300; ++it) {
        std::size_t n = 1 + rng.index(50), m = 1 + rng.index(50);
        std::vector<double> a(n), b(m);
        for (auto& v : a) v = rng.real_in(-5, 5);
        for (auto& v : b) v = rng.real_in(-5, 5);
        // mix in ties now and then
        if (it % 3 == 0 && !a.empty() && !b.empty()) b[0] = a[0];
        double d = ks_2samp(a, b).d;
        CHECK(std::abs(d - ks_d_oracle(a, b)) < 1e-10);
    }
}

TEST_CASE("ks_2samp is symmetric and monotone-transform invariant") {
    Rng rng(303);
    for (int it = 0; it < 100; ++it) {
        std::vector<double> a(5 + rng.index(20)), b(5 + rng.index(20));
        for (auto& v : a) v = rng.real_in(0, 10);
        for (auto& v : b) v = rng.real_in(0, 10);
        auto r1 = ks_2samp(a, b);
        auto r2 = ks_2samp(b, a);
        CHECK(r1.d == r2.d);
        CHECK(r1.p == r2.p);

        auto f = [](double x) { return std::exp(0.5 * x) + 3.0; }; // strictly increasing
        std::vector<double> fa(a.size()), fb(b.size());
        for (std::size_t i = 0; i < a.size(); ++i) fa[i] = f(a[i]);
        for (std::size_t i = 0; i < b.size(); ++i) fb[i] = f(b[i]);
        CHECK(ks_2samp(fa, fb).d == Catch::Approx(r1.d).margin(1e-12));
    }
}

TEST_CASE("ks asymptotic p-value: disjoint n=m=40 samples are tiny") {
    std::vector<double> a(40), b(40);
    for (int i = 0; i < 40; ++i) {
        a[static_cast<std::size_t>(i)] = i;
        b[static_cast<std::size_t>(i)] = 100 + i;
    }
    auto r = ks_2samp(a, b);
    CHECK(r.d == 1.0);
    CHECK(r.p < 1e-6);
    CHECK(r.p >= 0.0);
}

TEST_CASE("ks permutation fallback is sane on small samples") {
    Rng rng(404);
    std::vector<double> a = {1, 2, 3, 4}, b = {10, 11, 12, 13};
    auto r = ks_2samp_perm(a, b, rng, 2000);
    CHECK(r.d == 1.0);
    CHECK(r.p < 0.05); // complete separation: p near 2/C(8,4)
    std::vector<double> c = {1, 2, 3, 4}, d = {1.1, 2.1, 2.9, 4.2};
    auto r2 = ks_2samp_perm(c, d, rng, 2000);
    CHECK(r2.p > 0.5);
}

TEST_CASE("bonferroni_significant") {
    CHECK(bonferroni_significant(0.0005, 10));
    CHECK_FALSE(bonferroni_significant(0.002, 10));
    CHECK(bonferroni_significant(0.009, 1));
    CHECK_THROWS_AS(bonferroni_significant(0.5, 0), std::invalid_argument);
}
