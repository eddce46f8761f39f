#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bsphere/genealogy.hpp"
#include "bsphere/metric.hpp"
#include "bsphere/spine.hpp"
#include "bsphere/stats.hpp"

namespace bsphere {

/// Shared settings for one experiment run.
struct ExperimentContext {
    std::uint64_t root_seed = 1;
    unsigned workers = 1;
    std::string config_hash;
};

/// FNV-1a 64 of a string.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Root seed of a named sub-experiment: the first output of the stream
/// (root_seed, fnv1a64(label)).
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view label) noexcept;

// Importance-sampled excursion-measure functionals ---------------------------

/// A functional of a snake under N_x. It may refine the tree and returns one
/// value per name.
struct NFunctional {
    std::vector<std::string> names;
    std::function<std::vector<double>(SnakeTree&)> eval;
};

struct WindowOptions {
    double a = 1e-3;
    double b = 500.0;
    /// Log-spaced strata of the window; replica r goes to stratum r mod strata.
    std::size_t strata = 20;
    std::size_t coarse_n = 64;
    SnakeTreeOptions tree{};
};

/// N_x(F 1{a < sigma < b}) by uniform durations inside each stratum weighted by
/// the Itô density. window_tail_mass = ito_tail(b).
std::vector<EstimateReport> estimate_N_functional(const ExperimentContext& ctx, double x,
                                                  const NFunctional& functional,
                                                  const WindowOptions& window, std::size_t replicas);

NFunctional functional_one();
/// 1{W* <= level}.
NFunctional functional_min_below(double level);
/// Occupation A of {tip <= eps} on {W* > 0} from two independent randomized
/// passes A1, A2 with cells down to duration/cells_per_unit: outputs
/// "occupation" = (A1 + A2)/2 and "occupation_sq" = A1 A2.
NFunctional functional_positive_occupation(double eps, double cells_per_unit = 256.0);

// Moment scaling under N_0^(1) -------------------------------------------------

struct MomentOptions {
    std::size_t coarse_n = 256;
    /// Occupation cells are refined down to eps^4 * cell_factor.
    double cell_factor = 1.0 / 64.0;
    SnakeTreeOptions tree{};
};

struct MomentRow {
    int p = 1;
    double eps = 0.0;
    EstimateReport report;
    double normalized = 0.0;  ///< estimate / (p! eps^(4p))
    bool dropped = false;
};

struct MomentScaling {
    std::vector<MomentRow> rows;
    std::vector<int> p_list;
    std::vector<FitReport> fits;          ///< per p, log E against log eps
    std::vector<double> sup_normalized;   ///< per p, max over eps of normalized
    std::vector<double> sup_normalized_half;  ///< same from the first half of the replicas
};

MomentScaling moment_scaling(const ExperimentContext& ctx, const std::vector<int>& p_list,
                             const std::vector<double>& eps_list, std::size_t replicas,
                             const MomentOptions& opt = {});

// LIL statistic ----------------------------------------------------------------

struct LilRow {
    int k_max = 0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
    double max = 0.0;
};

struct LilSummary {
    int k_lo = 3;
    std::vector<LilRow> rows;  ///< statistic over k in [k_lo, k_max] for each k_max
    /// per replica, running max over k of V_{2^-k} / gauge_h(2^-k)
    std::vector<std::vector<double>> running_max;
};

LilSummary lil_statistic(const ExperimentContext& ctx, int k_lo, int k_hi, std::size_t replicas,
                         const MomentOptions& opt = {});

// Distributional tests --------------------------------------------------------

struct KsRow {
    std::string functional;
    KsReport ks;
    double mean_a = 0.0;
    double mean_b = 0.0;
};

/// Arm A: snakes on uniform Dyck lifetimes (lattice N_0^(1)); arm B:
/// independent snakes re-rooted at round(s n). Functionals: duration,
/// V_{1/4}, tip range, max zeta.
std::vector<KsRow> reroot_invariance_test(const ExperimentContext& ctx, double s_fixed,
                                          std::size_t replicas, std::size_t n);

struct ScalingTest {
    std::vector<KsRow> rows;
    bool sigma_exact = true;  ///< every pushed-forward duration equals lambda^2 exactly
};

/// Arm A: Theta_lambda of normalized snakes; arm B: snakes sampled directly
/// at duration lambda^2 with the same n. Functionals: max zeta, tip range,
/// W*, V_eps.
ScalingTest scaling_pushforward_test(const ExperimentContext& ctx, double lambda,
                                     std::size_t replicas, std::size_t n, double eps = 0.25);

// Hölder modulus ----------------------------------------------------------------

/// max over dyadic lags l and grid pairs (i, i + l) of
/// |tip_i - tip_{i+l}| / ((1 + log(1/(l dt))) (l dt)^exponent).
double holder_modulus(const SnakeTrajectory& w, double exponent);

struct HolderTable {
    std::vector<std::size_t> n_ladder;
    std::vector<std::vector<double>> stat;     ///< [replica][level], exponent 1/4
    std::vector<std::vector<double>> control;  ///< [replica][level], exponent 1/3
    std::vector<double> median_ratio;          ///< per step, median over replicas of stat ratio
    std::vector<double> control_median_ratio;
};

/// One trajectory per replica at the finest n (exact lifetime minima in the
/// tip sampler), subsampled along the ladder.
HolderTable holder_statistic(const ExperimentContext& ctx, const std::vector<std::size_t>& n_ladder,
                             std::size_t replicas);

// Dimension -----------------------------------------------------------------------

struct DimensionResult {
    std::vector<EstimateReport> points;   ///< E[V_eps] per eps
    std::vector<EstimateReport> control;  ///< E[label band volume] per eps
    FitReport fit;
    FitReport fit_half;  ///< first half of the replicas
    FitReport control_fit;
};

/// Slope of log E[V_eps] against log eps, balls centred at the distinguished
/// point after re-rooting at a uniform time. The control uses the label band
/// |tip_s - tip_U| <= eps around the uniform time U.
DimensionResult dimension_estimate(const ExperimentContext& ctx, const std::vector<double>& eps_list,
                                   std::size_t replicas, std::size_t n, const MomentOptions& opt = {});

// Bessel absolute continuity -------------------------------------------------------

struct TestSet {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

struct BesselAcOptions {
    double dt = 1e-3;
    /// Cells with min endpoint below refine_factor * sqrt(h) are bisected.
    double refine_factor = 3.0;
    int refine_depth = 10;
};

struct BesselAcRow {
    TestSet set;
    EstimateReport left;       ///< E_x[exp(-6 int B^-2) F(B_t); t < T_0] at dt/2
    EstimateReport left_coarse;  ///< same paths at dt
    EstimateReport right;      ///< x^4 E_x[R_t^-4 F(R_t)], Bessel(9)
    bool agree = false;        ///< |left - right| <= 1.96 sqrt(se_l^2 + se_r^2)
    bool sensitivity_flag = false;  ///< |left - left_coarse| > se_left
};

std::vector<BesselAcRow> bessel_ac_test(const ExperimentContext& ctx, double x, double t,
                                        const std::vector<TestSet>& sets, std::size_t replicas,
                                        const BesselAcOptions& opt = {});

// Spine Laplace transform -----------------------------------------------------------

struct SpineClgResult {
    EstimateReport at_cut;      ///< atoms with sigma >= sigma_cut
    EstimateReport at_quarter;  ///< atoms with sigma >= sigma_cut / 4, same spines
    double target = 0.0;
    double mean_L = 0.0;
    double acceptance = 0.0;
    double mean_atoms = 0.0;
    bool covers = false;         ///< target inside [lo - 0, hi + bias bound] at sigma_cut
    bool moves_toward = false;   ///< |est(c/4) - target| < |est(c) - target|
};

SpineClgResult spine_clg_experiment(const ExperimentContext& ctx, double x, std::size_t replicas,
                                    const SpineOptions& opt);

// Metric validation ----------------------------------------------------------------

struct MetricValidation {
    std::vector<std::vector<MetricRow>> rows;  ///< per trajectory
    std::vector<double> star_gaps;  ///< relative gaps of s*-pairs at the largest m
    double median_star_gap = 0.0;
    double max_ladder_increase = 0.0;  ///< max of est(m_next) - est(m) over all pairs
    bool bracket_ok = true;
};

MetricValidation metric_validation(const ExperimentContext& ctx, std::size_t trajectories,
                                   std::size_t n, const std::vector<std::size_t>& m_ladder,
                                   std::size_t star_targets, std::size_t random_pairs,
                                   double ident_tol_factor = 2.0,
                                   const std::vector<SnakeTrajectory>& given = {});

/// Normalized snake under N_0^(1): Vervaat lifetime on n steps and grid tips.
SnakeTrajectory sample_normalized_snake(RandomStream& rng, std::size_t n, const TipOptions& tips = {});

} // namespace bsphere
