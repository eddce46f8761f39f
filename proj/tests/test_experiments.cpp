#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bsphere/analytic.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/experiments.hpp"

using namespace bsphere;

TEST(Seeds, DeriveSeedIsDeterministicAndLabelled) {
    EXPECT_EQ(derive_seed(1, "c1"), derive_seed(1, "c1"));
    EXPECT_NE(derive_seed(1, "c1"), derive_seed(1, "c2"));
    EXPECT_NE(derive_seed(1, "c1"), derive_seed(2, "c1"));
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(NFunctional, MassOfWindowIsUnbiased) {
    const ExperimentContext ctx{5, 1, "h"};
    WindowOptions w;
    w.a = 0.01;
    w.b = 10.0;
    w.strata = 5;
    w.coarse_n = 8;
    const auto r = estimate_N_functional(ctx, 1.0, functional_one(), w, 5000);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r[0].estimate, ito_tail(0.01) - ito_tail(10.0), 5 * r[0].std_error + 1e-12);
    EXPECT_EQ(r[0].config_hash, "h");
    EXPECT_DOUBLE_EQ(r[0].window_tail_mass, ito_tail(10.0));
}

TEST(NFunctional, WorkerCountDoesNotChangeResults) {
    WindowOptions w;
    w.strata = 4;
    w.coarse_n = 16;
    const auto one = estimate_N_functional({9, 1, ""}, 1.0, functional_min_below(0.0), w, 400);
    const auto three = estimate_N_functional({9, 3, ""}, 1.0, functional_min_below(0.0), w, 400);
    EXPECT_EQ(one[0].estimate, three[0].estimate);
    EXPECT_EQ(one[0].std_error, three[0].std_error);
}

TEST(NFunctional, RejectsDegenerateWindows) {
    WindowOptions w;
    w.a = 1.0;
    w.b = 0.5;
    EXPECT_THROW(estimate_N_functional({}, 1.0, functional_one(), w, 100), ParameterError);
    w.b = 5.0;
    w.strata = 60;
    EXPECT_THROW(estimate_N_functional({}, 1.0, functional_one(), w, 100), ParameterError);
    EXPECT_THROW(functional_positive_occupation(0.0), ParameterError);
}

TEST(Moments, SmallRunHasNearQuarticSlope) {
    MomentOptions opt;
    opt.coarse_n = 64;
    const auto m = moment_scaling({11, 1, ""}, {1}, {1.0 / 16, 1.0 / 8, 1.0 / 4}, 300, opt);
    ASSERT_EQ(m.fits.size(), 1u);
    EXPECT_NEAR(m.fits[0].slope, 4.0, 0.6);
    for (const auto& row : m.rows) EXPECT_GT(row.report.estimate, 0.0);
    EXPECT_THROW(moment_scaling({}, {5}, {0.1, 0.2}, 10), ParameterError);
}

TEST(Holder, ModulusOfKnownPath) {
    SnakeTrajectory w;
    w.duration = 1.0;
    w.zeta.assign(9, 0.0);
    w.tip = {0, 1, 0, 0, 0, 0, 0, 0, 0};
    // increments of size 1 at lags 1, 2 and 4; the ratio is largest at h = 1/2
    const double expect = 1.0 / ((1.0 + std::log(2.0)) * std::pow(0.5, 0.25));
    EXPECT_NEAR(holder_modulus(w, 0.25), expect, 1e-12);
}

TEST(Holder, RejectsBadLadder) {
    EXPECT_THROW(holder_statistic({}, {64, 48}, 2), ParameterError);
    EXPECT_THROW(holder_statistic({}, {48, 64}, 2), ParameterError);
}

TEST(Scaling, PushforwardDurationIsExact) {
    const auto s = scaling_pushforward_test({12, 1, ""}, 2.0, 200, 256);
    EXPECT_TRUE(s.sigma_exact);
    for (const auto& r : s.rows) EXPECT_GT(r.ks.p_value, 1e-4) << r.functional;
}

TEST(Reroot, SmallRunIsConsistent) {
    const auto rows = reroot_invariance_test({13, 1, ""}, 0.3, 300, 256);
    for (const auto& r : rows) EXPECT_GT(r.ks.p_value, 1e-4) << r.functional;
}

TEST(Lil, QuantilesAreOrdered) {
    MomentOptions opt;
    opt.coarse_n = 64;
    const LilSummary s = lil_statistic({14, 1, ""}, 3, 6, 40, opt);
    ASSERT_EQ(s.rows.size(), 4u);
    for (const auto& r : s.rows) {
        EXPECT_LE(r.q50, r.q90);
        EXPECT_LE(r.q90, r.q99);
        EXPECT_LE(r.q99, r.max);
    }
    for (std::size_t k = 1; k < s.rows.size(); ++k) EXPECT_GE(s.rows[k].q50, s.rows[k - 1].q50 - 1e-12);
}

TEST(BesselAc, SmallRunAgrees) {
    const std::vector<TestSet> sets{{"mid", 1.0, 2.0}};
    BesselAcOptions opt;
    opt.dt = 1e-2;
    const auto rows = bessel_ac_test({15, 1, ""}, 1.0, 1.0, sets, 4000, opt);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].left.estimate, rows[0].right.estimate,
                5 * std::hypot(rows[0].left.std_error, rows[0].right.std_error));
}

TEST(MetricValidation, GivenTrajectoryIsUsed) {
    RandomStream rng(16, 0);
    const SnakeTrajectory w = sample_normalized_snake(rng, 512);
    const auto v = metric_validation({17, 1, ""}, 99, 0, {32, 128}, 8, 2, 2.0, {w});
    ASSERT_EQ(v.rows.size(), 1u);
    EXPECT_TRUE(v.bracket_ok);
    EXPECT_LE(v.max_ladder_increase, 1e-12);
    EXPECT_NEAR(v.median_star_gap, 0.0, 1e-12);
    EXPECT_THROW(metric_validation({}, 1, 64, {}, 1, 1), ParameterError);
}

TEST(Dimension, SmallRunSlope) {
    const auto d = dimension_estimate({18, 1, ""}, {1.0 / 32, 1.0 / 16, 1.0 / 8}, 200, 1024);
    EXPECT_NEAR(d.fit.slope, 4.0, 0.8);
    EXPECT_NEAR(d.control_fit.slope, 1.0, 0.3);
}
