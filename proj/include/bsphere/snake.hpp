#pragma once

#include <cstddef>
#include <vector>

#include "bsphere/paths.hpp"
#include "bsphere/random.hpp"
#include "bsphere/sparse_table.hpp"

namespace bsphere {

/// Discretized snake: lifetime and tip on a common uniform grid of [0, duration].
struct SnakeTrajectory {
    double duration = 0.0;
    double origin = 0.0;
    std::vector<double> zeta;
    std::vector<double> tip;

    std::size_t n_steps() const noexcept { return zeta.empty() ? 0 : zeta.size() - 1; }
    double dt() const noexcept { return duration / static_cast<double>(n_steps()); }

    bool operator==(const SnakeTrajectory&) const = default;
};

/// One segment of the current path in the tip sampler.
struct StackSegment {
    double h_lo, h_hi, v_lo, v_hi;
};

/// Ancestral line of the current tip as contiguous height segments.
class SnakeStack {
public:
    explicit SnakeStack(double origin) : origin_(origin) {}

    /// Value of the current path at height h, splitting the straddling segment.
    double cut(RandomStream& rng, double h);
    void extend(double h_hi, double v_hi);

    double height() const noexcept { return segs_.empty() ? 0.0 : segs_.back().h_hi; }
    double tip() const noexcept { return segs_.empty() ? origin_ : segs_.back().v_hi; }
    const std::vector<StackSegment>& segments() const noexcept { return segs_; }

private:
    double origin_;
    std::vector<StackSegment> segs_;
};

struct TipOptions {
    /// Sample the true lifetime minimum of each cell instead of the grid minimum.
    bool exact_bridge_min = false;
};

/// Tip labels given an excursion lifetime: the Gaussian field with mean origin
/// and Cov(W_s, W_t) = min of zeta over [s, t].
SnakeTrajectory sample_tips(RandomStream& rng, const GridPath& zeta, double origin,
                            const TipOptions& opt = {});

struct ArgMin {
    double value;
    std::size_t index;
};

/// Minimum of the tip over the grid; ties go to the smallest index.
ArgMin w_star(const SnakeTrajectory& w) noexcept;

/// Re-rooting at grid index r.
SnakeTrajectory reroot(const SnakeTrajectory& w, std::size_t r);

/// Scaling operator: duration * lambda^2, zeta * lambda, tip * sqrt(lambda).
SnakeTrajectory rescale(const SnakeTrajectory& w, double lambda);

/// Tree pseudo-distance zeta_s + zeta_t - 2 min over the plain interval between them.
double tree_distance(const SnakeTrajectory& w, const SparseTable& zeta_min, std::size_t i,
                     std::size_t j) noexcept;

/// O(1) queries of the label pseudo-distance D° after O(n log n) preprocessing.
class LabelDistance {
public:
    explicit LabelDistance(const SnakeTrajectory& w);

    /// D°(i, j) with cyclic intervals.
    double operator()(std::size_t i, std::size_t j) const noexcept;
    /// Tree pseudo-distance d(i, j).
    double tree(std::size_t i, std::size_t j) const noexcept;

    const SnakeTrajectory& trajectory() const noexcept { return *w_; }

private:
    const SnakeTrajectory* w_;
    SparseTable tip_min_;
    SparseTable zeta_min_;
};

double d_circle(const SnakeTrajectory& w, std::size_t i, std::size_t j);

/// (duration/n) * #{i < n : tip[i] - W* <= eps}.
double v_epsilon(const SnakeTrajectory& w, double eps);

/// Grid occupation (duration/n) * #{i < n : tip[i] <= level}.
double occupation_below(const SnakeTrajectory& w, double level);

void validate(const SnakeTrajectory& w);

} // namespace bsphere
