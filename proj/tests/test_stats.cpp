#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bsphere/random.hpp"
#include "bsphere/stats.hpp"

using namespace bsphere;

namespace {

// P(D >= d) by enumerating every interleaving of n a's and m b's.
double ks_brute(std::size_t n, std::size_t m, double d) {
    const std::size_t total = n + m;
    std::size_t hit = 0, all = 0;
    for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
        ++all;
        double i = 0, j = 0, best = 0;
        for (std::size_t k = 0; k < total; ++k) {
            if (mask >> k & 1u) ++i;
            else ++j;
            best = std::max(best, std::abs(i / n - j / m));
        }
        hit += best >= d - 1e-12;
    }
    return static_cast<double>(hit) / static_cast<double>(all);
}

} // namespace

TEST(Ks, ExactPValueMatchesEnumeration) {
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{4, 5}, {6, 6}, {3, 9}, {7, 8}})
        for (std::size_t k = 1; k <= n * m; k += 3) {
            const double d = static_cast<double>(k) / static_cast<double>(n * m);
            EXPECT_NEAR(ks_pvalue_exact(n, m, d), ks_brute(n, m, d), 1e-12) << n << "," << m << " d=" << d;
        }
}

TEST(Ks, IdenticalSamplesHavePValueOne) {
    std::vector<double> a{0.1, 0.5, 0.9, 1.3};
    const KsReport r = ks_two_sample(a, a);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(Ks, SeparatedSamples) {
    std::vector<double> a, b;
    for (int i = 0; i < 20; ++i) {
        a.push_back(i);
        b.push_back(100 + i);
    }
    const KsReport r = ks_two_sample(a, b);
    EXPECT_EQ(r.statistic, 1.0);
    EXPECT_TRUE(r.exact);
    EXPECT_LT(r.p_value, 1e-9);
}

TEST(Ks, AsymptoticPathIsCalibrated) {
    RandomStream rng(50, 0);
    int reject = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> a(300), b(400);
        for (double& x : a) x = rng.normal();
        for (double& x : b) x = rng.normal();
        const KsReport r = ks_two_sample(a, b);
        ASSERT_FALSE(r.exact);
        reject += r.p_value < 0.05;
    }
    EXPECT_NEAR(reject / static_cast<double>(trials), 0.05, 0.035);
}

TEST(Ks, ExactAndAsymptoticAgreeAtModerateSizes) {
    const double d = 0.25;
    const double exact = ks_pvalue_exact(80, 100, d);
    const double en = 80.0 * 100.0 / 180.0;
    const double asym = kolmogorov_survival((std::sqrt(en) + 0.12 + 0.11 / std::sqrt(en)) * d);
    EXPECT_NEAR(asym / exact, 1.0, 0.15);
}

TEST(Ks, KolmogorovSurvivalKnownValues) {
    EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 2e-4);
    EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
    EXPECT_DOUBLE_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(ChiSquare, OneDegreeOfFreedom) {
    const std::vector<double> obs{60, 40}, exp{50, 50};
    const ChiSquareReport r = chi_square_gof(obs, exp);
    EXPECT_DOUBLE_EQ(r.statistic, 4.0);
    EXPECT_DOUBLE_EQ(r.dof, 1.0);
    EXPECT_NEAR(r.p_value, std::erfc(std::sqrt(2.0)), 1e-12);
}

TEST(ChiSquare, PoolsSmallBinsFromTheRight) {
    const std::vector<double> obs{50, 30, 15, 3, 2}, exp{48, 32, 14, 4, 2};
    const ChiSquareReport r = chi_square_gof(obs, exp);
    // bins {3,2} pool to expected 6
    EXPECT_DOUBLE_EQ(r.dof, 3.0);
    const double stat = 4.0 / 48 + 4.0 / 32 + 1.0 / 14 + 1.0 / 6;
    EXPECT_NEAR(r.statistic, stat, 1e-12);
}

TEST(Fit, ExactLine) {
    const FitReport f = linear_fit({{1, 3}, {2, 5}, {4, 9}});
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(f.slope_stderr, 0.0, 1e-7);
}

TEST(Fit, NoisyLineStderr) {
    const FitReport f = linear_fit({{0, 0}, {1, 1}, {2, 1}, {3, 3}});
    EXPECT_NEAR(f.slope, 0.9, 1e-12);
    EXPECT_NEAR(f.intercept, -0.1, 1e-12);
    // residual sum of squares 0.7 on 2 dof, Sxx = 5
    EXPECT_NEAR(f.slope_stderr, std::sqrt(0.35 / 5.0), 1e-12);
}

TEST(Summaries, QuantileType7AndMedian) {
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 1.0), 4.0);
    EXPECT_DOUBLE_EQ(median({5, 1, 3}), 3.0);
    EXPECT_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
}

TEST(Summaries, SummarizeUsesSampleStandardError) {
    const std::vector<double> v{1, 2, 3, 4};
    const EstimateReport r = summarize("x", v, 7);
    EXPECT_DOUBLE_EQ(r.estimate, 2.5);
    EXPECT_NEAR(r.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
    EXPECT_NEAR(r.ci95.first, 2.5 - 1.96 * r.std_error, 1e-15);
    EXPECT_EQ(r.replicas, 4u);
    EXPECT_EQ(r.seed, 7u);
}
