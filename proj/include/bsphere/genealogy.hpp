#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bsphere/paths.hpp"
#include "bsphere/random.hpp"
#include "bsphere/snake.hpp"

namespace bsphere {

struct SnakeTreeOptions {
    /// Width multiplier of the heuristic label envelope used for decisions
    /// about the minimum (min_at_most, refine_minimum, refine_level_set).
    double bound_k = 4.0;
    /// Envelope multiplier used to classify cells in sample_occupation.
    double occupation_k = 2.5;
    /// Cells shorter than this fraction of the duration are never split.
    long double min_cell_fraction = 1e-18L;
};

/// Snake whose lifetime is an exactly sampled excursion and whose labels live
/// on the genealogical tree, so that any cell can be refined later without
/// discretization error.
///
/// Every cell between consecutive sample times stores the exact lifetime
/// minimum over the cell, its time, and the tree node at that height shared by
/// the two tips. Splitting a cell samples the lifetime at the midpoint from the
/// Williams decomposition around the stored minimum, a fresh minimum for the
/// half that does not contain it, and the new tip from the Brownian motion
/// indexed by the tree.
class SnakeTree {
public:
    struct Point {
        long double t;
        double zeta;
        double tip;
    };

    /// Excursion of the given duration on an n-cell coarse grid, labels from origin.
    static SnakeTree sample(RandomStream rng, std::size_t n, double duration, double origin,
                            const SnakeTreeOptions& opt = {});

    /// Uses a given excursion lifetime on its grid; cell minima are sampled
    /// from positive Brownian bridges.
    static SnakeTree from_lifetime(RandomStream rng, const GridPath& zeta, double origin,
                                   const SnakeTreeOptions& opt = {});

    const SnakeTreeOptions& options() const noexcept { return opt_; }
    void set_options(const SnakeTreeOptions& opt) noexcept { opt_ = opt; }

    double duration() const noexcept { return duration_; }
    double origin() const noexcept { return origin_; }
    std::size_t coarse_steps() const noexcept { return coarse_n_; }
    std::size_t size() const noexcept { return pts_.size(); }
    std::uint64_t splits() const noexcept { return splits_; }

    /// Values on the coarse grid only.
    SnakeTrajectory coarse_trajectory() const;

    /// All sample points in time order.
    std::vector<Point> points() const;

    /// Smallest tip over current sample points and its time.
    Point min_point() const noexcept;

    /// Best-first refinement towards the global label minimum; stops when no
    /// cell envelope reaches below (current minimum - resolution) or cells hit
    /// the size floor. Returns the refined minimum.
    double refine_minimum(double resolution);

    /// Decides whether the label minimum is <= level, refining only as needed.
    bool min_at_most(double level);

    /// Splits every cell whose envelope reaches down to level until it is
    /// no longer than max_cell.
    void refine_level_set(double level, long double max_cell);

    /// Trapezoid estimate of the time spent with tip <= level.
    double occupation_below(double level) const;

    /// Randomized estimate of the time spent with lo <= tip <= hi.
    ///
    /// Cells whose envelope lies inside the band count fully, cells outside
    /// count zero, and the remaining cells are refined down to max_cell and
    /// then scored by the tip at one uniform time inside each, inserted
    /// exactly. Unbiased up to envelope misses; two calls give conditionally
    /// independent estimates, so their product is unbiased for the square.
    double sample_occupation(double lo, double hi, long double max_cell);

    /// Inserts a sample point at time t (exactly) and returns its tip.
    double tip_at(long double t);

    /// Halves every cell `levels` times.
    void refine_uniform(int levels);

    /// Lower and upper label envelope of the cell that starts at point id.
    double cell_lower(std::int32_t id) const noexcept { return cell_lower(id, opt_.bound_k); }
    double cell_upper(std::int32_t id) const noexcept { return cell_upper(id, opt_.bound_k); }
    double cell_lower(std::int32_t id, double k) const noexcept;
    double cell_upper(std::int32_t id, double k) const noexcept;

private:
    struct Node {
        double h;
        double v;
        std::int32_t parent;
    };
    struct Pt {
        long double t;
        double z;
        std::int32_t tip;   // node of the tip
        std::int32_t next;  // next point in time, -1 at the end
        // cell [this, next]
        double m;
        long double tau;
        std::int32_t junction;
    };

    SnakeTree(RandomStream rng, const SnakeTreeOptions& opt) : rng_(rng), opt_(opt) {}

    void build(const GridPath& zeta, const std::vector<double>& cell_min,
               const std::vector<double>& cell_tau);
    std::int32_t insert_on_line(std::int32_t from, double h);
    /// Splits the cell that starts at id at time t (midpoint by default); returns the new point id.
    std::int32_t split(std::int32_t id);
    std::int32_t split_at(std::int32_t id, long double t);
    double envelope(std::int32_t id, double k) const noexcept;
    bool splittable(std::int32_t id) const noexcept;

    RandomStream rng_;
    SnakeTreeOptions opt_;
    double duration_ = 0.0;
    double origin_ = 0.0;
    std::size_t coarse_n_ = 0;
    std::uint64_t splits_ = 0;
    std::vector<Node> nodes_;
    std::vector<Pt> pts_;
};

} // namespace bsphere
