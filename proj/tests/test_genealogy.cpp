#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsphere/genealogy.hpp"
#include "bsphere/paths.hpp"
#include "bsphere/random.hpp"
#include "bsphere/snake.hpp"

using namespace bsphere;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// E int_0^1 1{W_s <= y} ds for the normalized snake from 0: e_s = sqrt(s(1-s)) chi_3.
double occupation_oracle(double y) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto chi3 = [](double r) { return std::sqrt(2.0 / std::numbers::pi) * r * r * std::exp(-r * r / 2); };
    auto inner = [&](double s) {
        const double scale = std::sqrt(s * (1 - s));
        return GK::integrate(
            [&](double r) {
                const double z = scale * r;
                return chi3(r) * 0.5 * std::erfc(-y / std::sqrt(2.0 * z));
            },
            0.0, 12.0, 10, 1e-10);
    };
    return GK::integrate(inner, 0.0, 1.0, 12, 1e-9);
}

} // namespace

TEST(SnakeTree, CoarseGridAndRefinementKeepPoints) {
    SnakeTree t = SnakeTree::sample(RandomStream(40, 0), 32, 2.0, 0.5);
    EXPECT_EQ(t.coarse_steps(), 32u);
    EXPECT_EQ(t.size(), 33u);
    EXPECT_DOUBLE_EQ(t.duration(), 2.0);
    const SnakeTrajectory before = t.coarse_trajectory();
    EXPECT_TRUE(is_excursion(GridPath{before.duration, before.zeta}));
    EXPECT_EQ(before.tip.front(), 0.5);
    t.refine_uniform(3);
    EXPECT_EQ(t.size(), 32u * 8 + 1);
    EXPECT_EQ(t.coarse_trajectory(), before);
    const auto pts = t.points();
    for (std::size_t k = 1; k < pts.size(); ++k) {
        ASSERT_LT(pts[k - 1].t, pts[k].t);
        ASSERT_GE(pts[k].zeta, 0.0);
    }
}

TEST(SnakeTree, TipAtExistingTimeIsStable) {
    SnakeTree t = SnakeTree::sample(RandomStream(41, 0), 16, 1.0, 0.0);
    const auto pts = t.points();
    EXPECT_DOUBLE_EQ(t.tip_at(pts[5].t), pts[5].tip);
    const double v = t.tip_at(0.3L);
    EXPECT_DOUBLE_EQ(t.tip_at(0.3L), v);
    EXPECT_EQ(t.size(), 18u);
}

TEST(SnakeTree, SameSeedSameRealization) {
    SnakeTree a = SnakeTree::sample(RandomStream(42, 3), 16, 1.0, 0.0);
    SnakeTree b = SnakeTree::sample(RandomStream(42, 3), 16, 1.0, 0.0);
    EXPECT_EQ(a.refine_minimum(1e-4), b.refine_minimum(1e-4));
    EXPECT_EQ(a.size(), b.size());
}

TEST(SnakeTree, RefineMinimumIsMonotoneAndBelowEnvelopes) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        SnakeTree t = SnakeTree::sample(RandomStream(43, s), 16, 1.0, 0.0);
        const double m0 = t.min_point().tip;
        const double m1 = t.refine_minimum(1e-2);
        const double m2 = t.refine_minimum(1e-4);
        EXPECT_LE(m1, m0);
        EXPECT_LE(m2, m1);
        EXPECT_EQ(m2, t.min_point().tip);
        EXPECT_LE(m2, 0.0);
    }
}

TEST(SnakeTree, MinAtMostAgreesWithRefinedMinimum) {
    int agree = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
        SnakeTree a = SnakeTree::sample(RandomStream(44, s), 16, 1.0, 0.0);
        SnakeTree b = SnakeTree::sample(RandomStream(44, s), 16, 1.0, 0.0);
        const bool below = a.min_at_most(-0.5);
        agree += below == (b.refine_minimum(1e-6) <= -0.5);
    }
    EXPECT_GE(agree, 39);
}

TEST(SnakeTree, LevelSetRefinementBoundsCells) {
    SnakeTree t = SnakeTree::sample(RandomStream(45, 0), 16, 1.0, 0.0);
    t.refine_level_set(-0.2, 1.0L / 1024);
    const auto pts = t.points();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const double lo = std::min(pts[k].tip, pts[k + 1].tip);
        const double hi = std::max(pts[k].tip, pts[k + 1].tip);
        if (lo <= -0.2 && hi >= -0.2) EXPECT_LE(pts[k + 1].t - pts[k].t, 1.0L / 1024 + 1e-15L);
    }
}

TEST(SnakeTree, OccupationEstimatorIsUnbiased) {
    const double y = 0.3;
    const double oracle = occupation_oracle(y);
    const int reps = 3000;
    double s = 0.0, s2 = 0.0;
    for (int r = 0; r < reps; ++r) {
        SnakeTree t = SnakeTree::sample(RandomStream(46, static_cast<std::uint64_t>(r)), 32, 1.0, 0.0);
        const double a = t.sample_occupation(kNegInf, y, 1.0L / 256);
        ASSERT_GE(a, 0.0);
        ASSERT_LE(a, 1.0 + 1e-12);
        s += a;
        s2 += a * a;
    }
    const double mean = s / reps, se = std::sqrt((s2 / reps - mean * mean) / (reps - 1));
    EXPECT_NEAR(mean, oracle, 5 * se + 1e-3);
}

TEST(SnakeTree, OccupationOfWholeLineIsDuration) {
    SnakeTree t = SnakeTree::sample(RandomStream(47, 0), 16, 3.0, 1.0);
    EXPECT_NEAR(t.sample_occupation(kNegInf, std::numeric_limits<double>::infinity(), 1e-3L), 3.0, 1e-12);
    EXPECT_NEAR(t.occupation_below(std::numeric_limits<double>::infinity()), 3.0, 1e-12);
}

TEST(SnakeTree, FromLifetimeUsesGivenGrid) {
    RandomStream rng(48, 0);
    const GridPath z = sample_normalized_excursion(rng, 64);
    SnakeTree t = SnakeTree::from_lifetime(RandomStream(48, 1), z, 0.0);
    const SnakeTrajectory w = t.coarse_trajectory();
    EXPECT_EQ(w.zeta, z.values);
    EXPECT_EQ(t.coarse_steps(), 64u);
}
