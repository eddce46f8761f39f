#include "bsphere/metric.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "bsphere/errors.hpp"
#include "bsphere/io.hpp"

namespace bsphere {

namespace {

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

} // namespace

std::size_t QuotientMesh::position(std::size_t grid_index) const noexcept {
    const auto it = std::lower_bound(anchors.begin(), anchors.end(), grid_index);
    if (it == anchors.end() || *it != grid_index) return anchors.size();
    return static_cast<std::size_t>(it - anchors.begin());
}

std::size_t QuotientMesh::class_count() const {
    std::size_t c = 0;
    for (std::size_t a = 0; a < class_of.size(); ++a)
        if (class_of[a] == a) ++c;
    return c;
}

double default_ident_tol(const SnakeTrajectory& w) {
    return 2.0 * std::sqrt(w.dt());
}

QuotientMesh build_mesh(const SnakeTrajectory& w, std::size_t m, double ident_tol,
                        const std::vector<std::size_t>& extra) {
    validate(w);
    const std::size_t n = w.n_steps();
    if (m < 2) throw ParameterError("build_mesh: need at least two anchors");
    if (ident_tol < 0.0) throw ParameterError("build_mesh: identification tolerance must be >= 0");
    if (m > n + 1) {
        std::cerr << "build_mesh: " << m << " anchors exceed the " << n + 1
                  << " grid points; clamped\n";
        m = n + 1;
    }
    QuotientMesh mesh;
    mesh.ident_tol = ident_tol;
    mesh.argmin_anchor = w_star(w).index;
    mesh.anchors.reserve(m + extra.size() + 2);
    for (std::size_t k = 0; k < m; ++k)
        mesh.anchors.push_back(static_cast<std::size_t>(
            std::llround(static_cast<double>(k) * static_cast<double>(n) / static_cast<double>(m - 1))));
    mesh.anchors.push_back(0);
    mesh.anchors.push_back(mesh.argmin_anchor);
    for (std::size_t e : extra) {
        if (e > n) throw ContractError("build_mesh: extra anchor beyond the grid");
        mesh.anchors.push_back(e);
    }
    std::sort(mesh.anchors.begin(), mesh.anchors.end());
    mesh.anchors.erase(std::unique(mesh.anchors.begin(), mesh.anchors.end()), mesh.anchors.end());

    const SparseTable zeta_min(w.zeta);
    const std::size_t k = mesh.anchors.size();
    UnionFind uf(k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            if (tree_distance(w, zeta_min, mesh.anchors[a], mesh.anchors[b]) <= ident_tol) uf.unite(a, b);
    mesh.class_of.resize(k);
    for (std::size_t a = 0; a < k; ++a) mesh.class_of[a] = uf.find(a);
    return mesh;
}

MeshMetric::MeshMetric(const QuotientMesh& mesh, const LabelDistance& dist)
    : mesh_(&mesh), dist_(&dist) {}

double MeshMetric::weight(std::size_t a, std::size_t b) const noexcept {
    const auto& tip = dist_->trajectory().tip;
    const std::size_t ga = mesh_->anchors[a];
    const std::size_t gb = mesh_->anchors[b];
    if (mesh_->class_of[a] == mesh_->class_of[b]) return std::abs(tip[ga] - tip[gb]);
    return (*dist_)(ga, gb);
}

const std::vector<double>& MeshMetric::from(std::size_t i) {
    const std::size_t src = mesh_->position(i);
    if (src == mesh_->size()) throw ContractError("approx_D: source is not an anchor");
    if (src == source_) return distances_;
    const std::size_t k = mesh_->size();
    distances_.assign(k, std::numeric_limits<double>::infinity());
    std::vector<char> done(k, 0);
    distances_[src] = 0.0;
    for (std::size_t it = 0; it < k; ++it) {
        std::size_t u = k;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < k; ++v)
            if (!done[v] && distances_[v] < best) {
                best = distances_[v];
                u = v;
            }
        if (u == k) break;
        done[u] = 1;
        for (std::size_t v = 0; v < k; ++v) {
            if (done[v]) continue;
            const double c = best + weight(u, v);
            if (c < distances_[v]) distances_[v] = c;
        }
    }
    source_ = src;
    return distances_;
}

MetricEstimate MeshMetric::approx_D(std::size_t i, std::size_t j) {
    const std::size_t pj = mesh_->position(j);
    if (pj == mesh_->size()) throw ContractError("approx_D: target is not an anchor");
    const auto& d = from(i);
    const auto& tip = dist_->trajectory().tip;
    MetricEstimate e;
    e.value = d[pj];
    e.lower_bound = std::abs(tip[i] - tip[j]);
    e.upper_bound = (*dist_)(i, j);
    e.mesh_size = mesh_->size();
    return e;
}

MetricEstimate approx_D(const QuotientMesh& mesh, const SnakeTrajectory& w, std::size_t i,
                        std::size_t j) {
    const LabelDistance dist(w);
    MeshMetric metric(mesh, dist);
    return metric.approx_D(i, j);
}

std::vector<MetricRow> refine_and_compare(const SnakeTrajectory& w,
                                          const std::vector<std::size_t>& m_ladder,
                                          const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                          double ident_tol) {
    if (m_ladder.empty()) throw ParameterError("refine_and_compare: empty ladder");
    for (std::size_t k = 1; k < m_ladder.size(); ++k)
        if (m_ladder[k] <= m_ladder[k - 1])
            throw ParameterError("refine_and_compare: ladder must be strictly increasing");
    std::vector<std::size_t> base;
    for (const auto& [i, j] : pairs) {
        base.push_back(i);
        base.push_back(j);
    }
    const LabelDistance dist(w);
    std::vector<MetricRow> rows;
    for (std::size_t m : m_ladder) {
        const QuotientMesh mesh = build_mesh(w, m, ident_tol, base);
        MeshMetric metric(mesh, dist);
        for (const auto& [i, j] : pairs) {
            const MetricEstimate e = metric.approx_D(i, j);
            rows.push_back({m, i, j, e.lower_bound, e.value, e.upper_bound});
        }
        base = mesh.anchors;
    }
    return rows;
}

void write_metric_csv(std::ostream& os, const std::vector<MetricRow>& rows) {
    CsvWriter csv(os, {"m", "i", "j", "lower", "estimate", "upper"});
    for (const auto& r : rows)
        csv.row({std::to_string(r.m), std::to_string(r.i), std::to_string(r.j), format_real(r.lower),
                 format_real(r.estimate), format_real(r.upper)});
}

} // namespace bsphere
