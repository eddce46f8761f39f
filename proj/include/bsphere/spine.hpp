#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bsphere/genealogy.hpp"
#include "bsphere/paths.hpp"
#include "bsphere/random.hpp"
#include "bsphere/snake.hpp"
#include "bsphere/stats.hpp"

namespace bsphere {

/// Snake conditioned on W* = -x, shifted by x: a Bessel(9) spine from 0 up to
/// its last passage at x, with Poisson atoms of intensity
/// 4 1{t <= L_x} dt N_{U_t}(. ; W* > 0).
struct SpineAtom {
    double attach_time = 0.0;
    double origin = 0.0;
    double duration = 0.0;
    SnakeTrajectory trajectory;  ///< coarse grid view of the atom
};

struct SpineSample {
    double level_x = 0.0;
    GridPath spine;
    double L_x = 0.0;
    double sigma_cut = 0.0;
    std::vector<SpineAtom> atoms;
    std::uint64_t proposed = 0;
    std::uint64_t accepted = 0;
    /// Proposed atoms per spine cell of length grid_dt (last cell may be shorter).
    std::vector<std::uint32_t> cell_counts;
};

struct SpineOptions {
    double grid_dt = 1e-3;
    double sigma_cut = 1e-4;
    std::size_t atom_grid_n = 16;
    /// Resource error when fewer than this fraction of at least
    /// `acceptance_min_proposals` proposals survive the W* > 0 test.
    double acceptance_floor = 1e-3;
    std::uint64_t acceptance_min_proposals = 200;
    LastPassageOptions last_passage{};
    SnakeTreeOptions atom_tree{};
};

SpineSample sample_spine(RandomStream& rng, double x, const SpineOptions& opt = {});

/// Expected proposed atoms per unit spine length: 4 (2 pi sigma_cut)^-1/2.
double spine_atom_rate(double sigma_cut);

/// Bounds for dropping atoms shorter than sigma_cut on a spine of length L.
TruncationReport spine_truncation(double sigma_cut, double L);

/// Sum of atom durations, optionally only over atoms of duration >= min_sigma.
double functional_sigma(const SpineSample& s, double min_sigma = 0.0);

/// Grid occupation of {tip <= eps} summed over atoms.
double functional_occupation(const SpineSample& s, double eps);

struct TailRow {
    double u = 0.0;
    double probability = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t exceed = 0;
    bool flagged = false;  ///< fewer than min_tail_samples weighted exceedances
};

struct TailTable {
    double x = 0.0;
    double eps = 0.0;
    std::vector<TailRow> rows;
    FitReport fit;              ///< log probability against u over unflagged rows with u > 0
    double mass_estimate = 0.0; ///< estimated N_x(0 < W* <= eps) inside the window
    double mass_exact = 0.0;    ///< 3/2 ((x-eps)^-2 - x^-2)
    std::uint64_t replicas = 0;
    std::uint64_t accepted = 0;
};

struct TailOptions {
    std::size_t replicas = 20000;
    std::size_t coarse_n = 64;
    /// Duration window in units of eps^4, log-stratified.
    double window_lo = 1e-2;
    double window_hi = 1e3;
    std::size_t strata = 10;
    std::uint64_t min_tail_samples = 20;
    unsigned workers = 1;
};

/// P(occupation of {tip <= eps} > u eps^4 | 0 < W* <= eps) under N_x, for
/// x in [2 eps, 3 eps], estimated by a self-normalized ratio over
/// importance-sampled durations.
TailTable conditional_tail_experiment(std::uint64_t root_seed, double x, double eps,
                                      const std::vector<double>& u_grid, const TailOptions& opt = {});

} // namespace bsphere
