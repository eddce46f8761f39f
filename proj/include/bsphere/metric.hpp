#pragma once

#include <cstddef>
#include <ostream>
#include <utility>
#include <vector>

#include "bsphere/snake.hpp"

namespace bsphere {

/// Finite quotient model of the label metric on a set of anchor times.
///
/// The graph is complete on the anchors with weight D°(a, b). Anchors whose
/// tree distance is at most ident_tol are merged into one class, and members
/// of a class are joined by edges of weight |tip[a] - tip[b]|.
struct QuotientMesh {
    std::vector<std::size_t> anchors;  ///< sorted grid indices
    std::vector<std::size_t> class_of; ///< class representative per anchor position
    std::size_t argmin_anchor = 0;     ///< grid index of the tip minimum
    double ident_tol = 0.0;

    std::size_t size() const noexcept { return anchors.size(); }
    /// Position of a grid index among the anchors, or size() when absent.
    std::size_t position(std::size_t grid_index) const noexcept;
    std::size_t class_count() const;
};

/// Default identification tolerance 2 sqrt(duration / n).
double default_ident_tol(const SnakeTrajectory& w);

/// Anchors: m equally spaced grid indices including both ends, together with
/// 0, the tip argmin and every index in `extra`. m larger than n + 1 is clamped.
QuotientMesh build_mesh(const SnakeTrajectory& w, std::size_t m, double ident_tol,
                        const std::vector<std::size_t>& extra = {});

struct MetricEstimate {
    double value = 0.0;
    double lower_bound = 0.0;  ///< |tip[i] - tip[j]|
    double upper_bound = 0.0;  ///< D°(i, j)
    std::size_t mesh_size = 0;
};

/// Shortest-path distances over the mesh from one anchor.
class MeshMetric {
public:
    MeshMetric(const QuotientMesh& mesh, const LabelDistance& dist);

    /// Distances from the anchor at grid index i to every anchor (mesh order).
    const std::vector<double>& from(std::size_t i);

    MetricEstimate approx_D(std::size_t i, std::size_t j);

    const QuotientMesh& mesh() const noexcept { return *mesh_; }

private:
    double weight(std::size_t a, std::size_t b) const noexcept;

    const QuotientMesh* mesh_;
    const LabelDistance* dist_;
    std::size_t source_ = static_cast<std::size_t>(-1);
    std::vector<double> distances_;
};

/// Convenience single query; throws ContractError if i or j is not an anchor.
MetricEstimate approx_D(const QuotientMesh& mesh, const SnakeTrajectory& w, std::size_t i,
                        std::size_t j);

struct MetricRow {
    std::size_t m = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    double lower = 0.0;
    double estimate = 0.0;
    double upper = 0.0;
};

/// Estimates for every pair along a strictly increasing ladder of anchor
/// counts. Each level contains the anchors of the previous one and the pair
/// endpoints, so estimates are nonincreasing along the ladder.
std::vector<MetricRow> refine_and_compare(const SnakeTrajectory& w,
                                          const std::vector<std::size_t>& m_ladder,
                                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                          double ident_tol);

/// CSV with header m,i,j,lower,estimate,upper.
void write_metric_csv(std::ostream& os, const std::vector<MetricRow>& rows);

} // namespace bsphere
