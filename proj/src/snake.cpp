#include "bsphere/snake.hpp"

#include <algorithm>
#include <cmath>

#include "bsphere/errors.hpp"

namespace bsphere {

double SnakeStack::cut(RandomStream& rng, double h) {
    while (!segs_.empty() && segs_.back().h_lo >= h) segs_.pop_back();
    if (segs_.empty()) return origin_;
    StackSegment& s = segs_.back();
    if (h >= s.h_hi) return s.v_hi;
    const double span = s.h_hi - s.h_lo;
    const double w = (h - s.h_lo) / span;
    const double v = s.v_lo + w * (s.v_hi - s.v_lo) +
                     std::sqrt((h - s.h_lo) * (s.h_hi - h) / span) * rng.normal();
    s.h_hi = h;
    s.v_hi = v;
    return v;
}

void SnakeStack::extend(double h_hi, double v_hi) {
    const double h_lo = height();
    if (h_hi <= h_lo) return;
    segs_.push_back({h_lo, h_hi, tip(), v_hi});
}

void validate(const SnakeTrajectory& w) {
    if (w.zeta.size() < 2 || w.zeta.size() != w.tip.size())
        throw ContractError("snake trajectory: zeta and tip need the same length >= 2");
    if (!(w.duration > 0.0)) throw ContractError("snake trajectory: duration must be positive");
}

SnakeTrajectory sample_tips(RandomStream& rng, const GridPath& zeta, double origin,
                            const TipOptions& opt) {
    if (!is_excursion(zeta)) throw ContractError("sample_tips: lifetime is not an excursion path");
    const std::size_t n = zeta.n_steps();
    const double dt = zeta.dt();
    SnakeTrajectory w;
    w.duration = zeta.duration;
    w.origin = origin;
    w.zeta = zeta.values;
    w.tip.resize(n + 1);
    w.tip[0] = origin;
    SnakeStack stack(origin);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = zeta.values[i];
        const double b = zeta.values[i + 1];
        double m = std::min(a, b);
        if (opt.exact_bridge_min) m = sample_bridge_min_above(rng, a, b, dt, 0.0);
        const double vm = stack.cut(rng, m);
        const double v = b > m ? vm + std::sqrt(b - m) * rng.normal() : vm;
        stack.extend(b, v);
        w.tip[i + 1] = v;
    }
    w.tip[n] = origin;
    return w;
}

ArgMin w_star(const SnakeTrajectory& w) noexcept {
    ArgMin r{w.tip.empty() ? 0.0 : w.tip[0], 0};
    for (std::size_t i = 1; i < w.tip.size(); ++i)
        if (w.tip[i] < r.value) r = {w.tip[i], i};
    return r;
}

SnakeTrajectory reroot(const SnakeTrajectory& w, std::size_t r) {
    validate(w);
    const std::size_t n = w.n_steps();
    if (r > n) throw ParameterError("reroot: index out of range");
    const SparseTable zmin(w.zeta);
    SnakeTrajectory out;
    out.duration = w.duration;
    out.origin = 0.0;
    out.zeta.resize(n + 1);
    out.tip.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const std::size_t j = r + i <= n ? r + i : r + i - n;
        out.zeta[i] = tree_distance(w, zmin, r, j);
        out.tip[i] = w.tip[j] - w.tip[r];
    }
    out.zeta[0] = 0.0;
    out.zeta[n] = 0.0;
    out.tip[0] = 0.0;
    out.tip[n] = 0.0;
    return out;
}

SnakeTrajectory rescale(const SnakeTrajectory& w, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("rescale: lambda must be positive");
    SnakeTrajectory out = w;
    const double root = std::sqrt(lambda);
    out.duration = w.duration * lambda * lambda;
    out.origin = w.origin * root;
    for (double& z : out.zeta) z *= lambda;
    for (double& v : out.tip) v *= root;
    return out;
}

double tree_distance(const SnakeTrajectory& w, const SparseTable& zeta_min, std::size_t i,
                     std::size_t j) noexcept {
    if (i == j) return 0.0;
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    return std::max(0.0, w.zeta[i] + w.zeta[j] - 2.0 * zeta_min.min(lo, hi));
}

LabelDistance::LabelDistance(const SnakeTrajectory& w)
    : w_(&w), tip_min_(w.tip), zeta_min_(w.zeta) {
    validate(w);
}

double LabelDistance::operator()(std::size_t i, std::size_t j) const noexcept {
    if (i == j) return 0.0;
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    const std::size_t n = w_->n_steps();
    const double inner = tip_min_.min(lo, hi);
    const double outer = std::min(tip_min_.min(hi, n), tip_min_.min(0, lo));
    const double d = w_->tip[i] + w_->tip[j] - 2.0 * std::max(inner, outer);
    return std::max(d, std::abs(w_->tip[i] - w_->tip[j]));
}

double LabelDistance::tree(std::size_t i, std::size_t j) const noexcept {
    return tree_distance(*w_, zeta_min_, i, j);
}

double d_circle(const SnakeTrajectory& w, std::size_t i, std::size_t j) {
    if (i > w.n_steps() || j > w.n_steps()) throw ParameterError("d_circle: index out of range");
    return LabelDistance(w)(i, j);
}

double occupation_below(const SnakeTrajectory& w, double level) {
    const std::size_t n = w.n_steps();
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += w.tip[i] <= level ? 1 : 0;
    return w.dt() * static_cast<double>(count);
}

double v_epsilon(const SnakeTrajectory& w, double eps) {
    if (!(eps >= 0.0)) throw ParameterError("v_epsilon: eps must be nonnegative");
    const std::size_t n = w.n_steps();
    const double ws = w_star(w).value;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += w.tip[i] - ws <= eps ? 1 : 0;
    return w.dt() * static_cast<double>(count);
}

} // namespace bsphere
