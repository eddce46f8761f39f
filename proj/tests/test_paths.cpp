#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bsphere/analytic.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/paths.hpp"
#include "bsphere/random.hpp"

using namespace bsphere;

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

} // namespace

TEST(Bridge, EndpointsAndMidpointVariance) {
    RandomStream rng(10, 0);
    std::vector<double> mid;
    for (int r = 0; r < 20000; ++r) {
        const GridPath p = sample_bridge(rng, 8, 2.0, 0.5, -1.0);
        ASSERT_EQ(p.values.size(), 9u);
        ASSERT_EQ(p.values.front(), 0.5);
        ASSERT_EQ(p.values.back(), -1.0);
        mid.push_back(p.values[4]);
    }
    // mean (a+b)/2, variance T/4
    EXPECT_NEAR(mean_of(mid), -0.25, 5 * se_of(mid));
    double v = 0.0;
    for (double x : mid) v += (x + 0.25) * (x + 0.25);
    EXPECT_NEAR(v / static_cast<double>(mid.size()), 0.5, 0.03);
}

TEST(Excursion, NormalizedIsPositiveAndHasKnownMaximumMean) {
    RandomStream rng(11, 0);
    std::vector<double> max, half;
    for (int r = 0; r < 3000; ++r) {
        const GridPath e = sample_normalized_excursion(rng, 4096);
        ASSERT_TRUE(is_excursion(e));
        ASSERT_DOUBLE_EQ(e.duration, 1.0);
        max.push_back(*std::max_element(e.values.begin(), e.values.end()));
        half.push_back(e.values[2048]);
    }
    // E[max e] = sqrt(pi/2); the grid maximum sits below by about 0.58 sqrt(dt)
    EXPECT_NEAR(mean_of(max), std::sqrt(std::numbers::pi / 2.0), 0.03);
    // e_{1/2} = chi_3 / 2
    EXPECT_NEAR(mean_of(half), std::sqrt(2.0 / std::numbers::pi), 5 * se_of(half));
}

TEST(Excursion, DurationScalesSqrt) {
    RandomStream rng(12, 0);
    std::vector<double> half;
    for (int r = 0; r < 5000; ++r) {
        const GridPath e = sample_excursion(rng, 64, 4.0);
        ASSERT_TRUE(is_excursion(e));
        ASSERT_DOUBLE_EQ(e.duration, 4.0);
        half.push_back(e.values[32]);
    }
    EXPECT_NEAR(mean_of(half), 2.0 * std::sqrt(2.0 / std::numbers::pi), 5 * se_of(half));
}

TEST(Excursion, IsExcursionRejectsBadPaths) {
    GridPath p{1.0, {0.0, 0.5, 0.0}};
    EXPECT_TRUE(is_excursion(p));
    p.values[1] = -0.1;
    EXPECT_FALSE(is_excursion(p));
    p.values = {0.1, 0.5, 0.0};
    EXPECT_FALSE(is_excursion(p));
}

TEST(Dyck, PathsAreUniformLatticeExcursions) {
    // n = 6: five Dyck paths, each with probability 1/5
    RandomStream rng(28, 0);
    std::map<std::vector<double>, int> seen;
    const int draws = 50000;
    for (int d = 0; d < draws; ++d) {
        const GridPath e = sample_dyck_excursion(rng, 6, 6.0);
        ASSERT_TRUE(is_excursion(e));
        for (std::size_t k = 0; k < 6; ++k) ASSERT_EQ(std::abs(e.values[k + 1] - e.values[k]), 1.0);
        ++seen[e.values];
    }
    ASSERT_EQ(seen.size(), 5u);
    std::vector<double> obs, exp;
    for (const auto& [path, count] : seen) {
        obs.push_back(count);
        exp.push_back(draws / 5.0);
    }
    double stat = 0.0;
    for (std::size_t k = 0; k < obs.size(); ++k) stat += (obs[k] - exp[k]) * (obs[k] - exp[k]) / exp[k];
    EXPECT_LT(stat, boost::math::quantile(boost::math::chi_squared(4), 0.999));
    EXPECT_THROW(sample_dyck_excursion(rng, 7, 1.0), ParameterError);
}

TEST(Dyck, MaximumMatchesBrownianExcursion) {
    RandomStream rng(29, 0);
    double sum = 0.0;
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
        const GridPath e = sample_dyck_excursion(rng, 4096, 1.0);
        sum += *std::max_element(e.values.begin(), e.values.end());
    }
    EXPECT_NEAR(sum / reps, std::sqrt(std::numbers::pi / 2), 0.03);
}

TEST(Duration, DensityIsMinusDerivativeOfTail) {
    for (double s : {1e-4, 0.01, 1.0, 30.0}) {
        const double h = s * 1e-5;
        EXPECT_NEAR(ito_density(s), -(ito_tail(s + h) - ito_tail(s - h)) / (2 * h), 1e-6 * ito_density(s));
    }
}

TEST(Duration, ImportanceWeightsAreUnbiased) {
    RandomStream rng(13, 0);
    const double a = 0.01, b = 10.0;
    std::vector<double> w;
    for (int r = 0; r < 200000; ++r) {
        const DurationSample d = sample_duration(rng, a, b);
        ASSERT_GE(d.duration, a);
        ASSERT_LE(d.duration, b);
        w.push_back(d.importance_weight);
    }
    EXPECT_NEAR(mean_of(w), ito_tail(a) - ito_tail(b), 5 * se_of(w));
    EXPECT_THROW(sample_duration(rng, 0.0, 1.0), ParameterError);
    EXPECT_THROW(sample_duration(rng, 2.0, 1.0), ParameterError);
}

TEST(Bessel9, SecondMomentIsExact) {
    RandomStream rng(14, 0);
    std::vector<double> r2;
    for (int r = 0; r < 20000; ++r) {
        const GridPath p = sample_bessel9(rng, 1.5, 0.25, 2.0);
        ASSERT_EQ(p.values.size(), 9u);
        r2.push_back(p.values.back() * p.values.back());
    }
    EXPECT_NEAR(mean_of(r2), 1.5 * 1.5 + 9 * 2.0, 5 * se_of(r2));
}

TEST(Bessel9, ChiSquareLawFromZero) {
    RandomStream rng(15, 0);
    int below = 0;
    const int n = 40000;
    for (int r = 0; r < n; ++r) below += sample_bessel9(rng, 0.0, 0.5, 1.0).values.back() <= 3.0;
    const double p = boost::math::cdf(boost::math::chi_squared(9.0), 9.0);
    EXPECT_NEAR(below / static_cast<double>(n), p, 5 * std::sqrt(p * (1 - p) / n));
}

TEST(Bessel9, ReturnProbability) {
    EXPECT_DOUBLE_EQ(bessel9_return_probability(0.5, 1.0), 1.0);
    EXPECT_NEAR(bessel9_return_probability(2.0, 1.0), std::pow(0.5, 7), 1e-15);
}

TEST(LastPassage, LawOfLevelOneFromZero) {
    // L = 1 / (2 G) with G ~ Gamma(7/2), so E[L] = 1/5 and P(L <= 0.1) = Q(7/2, 5)
    RandomStream rng(16, 0);
    std::vector<double> L;
    int small = 0;
    for (int r = 0; r < 3000; ++r) {
        const LastPassage lp = bessel9_last_passage(rng, 1.0, 1e-3);
        L.push_back(lp.last_passage_time);
        small += lp.last_passage_time <= 0.1;
    }
    EXPECT_NEAR(mean_of(L), 0.2, 5 * se_of(L));
    const double p = boost::math::gamma_q(3.5, 5.0);
    EXPECT_NEAR(small / 3000.0, p, 5 * std::sqrt(p * (1 - p) / 3000.0));
}

TEST(LastPassage, RecordIsConsistent) {
    RandomStream rng(17, 0);
    for (int r = 0; r < 50; ++r) {
        const LastPassage lp = bessel9_last_passage(rng, 0.7, 1e-3);
        ASSERT_FALSE(lp.times.empty());
        ASSERT_EQ(lp.times.size(), lp.points.size());
        EXPECT_EQ(lp.times.back(), lp.last_passage_time);
        EXPECT_TRUE(std::is_sorted(lp.times.begin(), lp.times.end()));
        double r_end = 0.0;
        for (double c : lp.points.back()) r_end += c * c;
        EXPECT_LE(std::sqrt(r_end), 0.7 + 1e-12);
        EXPECT_LE(lp.path.time(lp.last_passage_index), lp.last_passage_time + 1e-12);
        RandomStream probe(1, 1);
        for (std::size_t k = 0; k < lp.times.size(); k += 7) {
            double n2 = 0.0;
            for (double c : lp.points[k]) n2 += c * c;
            EXPECT_DOUBLE_EQ(lp.radius_at(probe, lp.times[k]), std::sqrt(n2));
        }
    }
}

TEST(LastPassage, RejectsBadArguments) {
    RandomStream rng(1, 0);
    EXPECT_THROW(bessel9_last_passage(rng, 0.0, 1e-3), ParameterError);
    EXPECT_THROW(bessel9_last_passage(rng, 1.0, 0.0), ParameterError);
    LastPassageOptions opt;
    opt.max_time = 1e-2;
    EXPECT_THROW(bessel9_last_passage(rng, 1.0, 1e-3, opt), ResourceError);
}

TEST(BridgeMinimum, DistributionFunction) {
    // P(min <= m) = exp(-2 (a - m)(b - m) / T)
    RandomStream rng(18, 0);
    const double a = 0.4, b = 1.1, T = 0.8;
    const int n = 50000;
    std::vector<double> mins(n);
    for (auto& m : mins) m = sample_bridge_min(rng, a, b, T);
    for (double m : {-0.8, -0.2, 0.1, 0.3}) {
        const double p = std::exp(-2 * (a - m) * (b - m) / T);
        const double emp = std::count_if(mins.begin(), mins.end(), [&](double v) { return v <= m; }) /
                           static_cast<double>(n);
        EXPECT_NEAR(emp, p, 5 * std::sqrt(p * (1 - p) / n) + 1e-4);
    }
}

TEST(BridgeMinimum, ConditionedAboveFloor) {
    RandomStream rng(19, 0);
    const double a = 0.4, b = 1.1, T = 0.8, floor = 0.1;
    const int n = 50000;
    const double pf = std::exp(-2 * (a - floor) * (b - floor) / T);
    for (double m : {0.15, 0.25, 0.35}) {
        int below = 0;
        RandomStream r2(19, static_cast<std::uint64_t>(m * 100));
        for (int i = 0; i < n; ++i) {
            const double v = sample_bridge_min_above(r2, a, b, T, floor);
            ASSERT_GE(v, floor);
            below += v <= m;
        }
        const double p = (std::exp(-2 * (a - m) * (b - m) / T) - pf) / (1 - pf);
        EXPECT_NEAR(below / static_cast<double>(n), p, 5 * std::sqrt(p * (1 - p) / n));
    }
    (void)rng;
}

TEST(BridgeMinimum, ArgminMeanMatchesFirstPassageConvolution) {
    const double a = 0.3, b = 0.9, T = 1.0, m = -0.2;
    auto f = [](double c, double t) {
        return c / std::sqrt(2 * std::numbers::pi * t * t * t) * std::exp(-c * c / (2 * t));
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto dens = [&](double t) { return f(a - m, t) * f(b - m, T - t); };
    const double z = GK::integrate(dens, 0.0, T, 15, 1e-12);
    const double mean = GK::integrate([&](double t) { return t * dens(t); }, 0.0, T, 15, 1e-12) / z;
    RandomStream rng(20, 0);
    std::vector<double> tau;
    for (int r = 0; r < 40000; ++r) {
        const double t = sample_bridge_argmin(rng, a, b, T, m);
        ASSERT_GT(t, 0.0);
        ASSERT_LT(t, T);
        tau.push_back(t);
    }
    EXPECT_NEAR(mean_of(tau), mean, 5 * se_of(tau));
}

TEST(InverseGaussian, Moments) {
    RandomStream rng(21, 0);
    const double mu = 0.7, lambda = 2.5;
    std::vector<double> x;
    for (int r = 0; r < 100000; ++r) x.push_back(sample_inverse_gaussian(rng, mu, lambda));
    EXPECT_NEAR(mean_of(x), mu, 5 * se_of(x));
    double v = 0.0;
    for (double y : x) v += (y - mu) * (y - mu);
    EXPECT_NEAR(v / static_cast<double>(x.size()), mu * mu * mu / lambda, 0.02);
}
