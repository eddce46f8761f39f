#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bsphere {

/// Atoms shorter than sigma_cut are dropped by the spine sampler; these are
/// the analytic bounds on what that removes.
struct TruncationReport {
    double sigma_cut = 0.0;
    /// Expected number of dropped atoms per unit spine length.
    double dropped_rate_bound = 0.0;
    /// Bound on the bias of E[1 - exp(-sigma/2)] from the dropped atoms.
    double dropped_functional_bias_bound = 0.0;
};

/// Monte Carlo estimate with replica-level error.
struct EstimateReport {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    std::uint64_t replicas = 0;
    std::uint64_t seed = 0;
    /// N-mass of durations beyond the sampling window (0 when not applicable).
    double window_tail_mass = 0.0;
    std::optional<TruncationReport> truncation;
    std::string config_hash;
};

/// Report from a mean and its standard error; ci95 = estimate +- 1.96 se.
EstimateReport make_report(std::string name, double estimate, double std_error,
                           std::uint64_t replicas, std::uint64_t seed);

/// Report for the sample mean of independent replica values.
EstimateReport summarize(std::string name, std::span<const double> values, std::uint64_t seed);

/// Least-squares line through (x, y).
struct FitReport {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;
};

FitReport linear_fit(std::vector<std::pair<double, double>> points);

struct KsReport {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    bool exact = false;
};

/// Two-sample Kolmogorov-Smirnov test. The p-value is exact (lattice path
/// count) when n1*n2 <= exact_limit, otherwise the Stephens-corrected
/// asymptotic series.
KsReport ks_two_sample(std::vector<double> a, std::vector<double> b,
                       std::size_t exact_limit = 10000);

/// P(D >= d) for the two-sample statistic with sizes n, m, no ties.
double ks_pvalue_exact(std::size_t n, std::size_t m, double d);

/// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

struct ChiSquareReport {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

/// Pearson goodness of fit of counts against expected counts (bins pooled
/// from the right until each expected count is at least min_expected).
ChiSquareReport chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                               double min_expected = 5.0);

/// Linear-interpolated sample quantile (type 7).
double quantile(std::vector<double> values, double q);

double median(std::vector<double> values);

} // namespace bsphere
