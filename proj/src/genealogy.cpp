#include "bsphere/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <utility>

#include "bsphere/errors.hpp"

namespace bsphere {

namespace {

/// Value at elapsed time u of a 3-d Bessel bridge from 0 to c over length S.
double bes3_bridge_value(RandomStream& rng, double c, long double u, long double S) {
    const double w = static_cast<double>(u / S);
    const double sd = std::sqrt(static_cast<double>(u * (S - u) / S));
    const double x = w * c + sd * rng.normal();
    const double y = sd * rng.normal();
    const double z = sd * rng.normal();
    return std::sqrt(x * x + y * y + z * z);
}

} // namespace

SnakeTree SnakeTree::sample(RandomStream rng, std::size_t n, double duration, double origin,
                            const SnakeTreeOptions& opt) {
    const GridPath zeta = sample_excursion(rng, n, duration);
    return from_lifetime(rng, zeta, origin, opt);
}

SnakeTree SnakeTree::from_lifetime(RandomStream rng, const GridPath& zeta, double origin,
                                   const SnakeTreeOptions& opt) {
    if (!is_excursion(zeta)) throw ContractError("SnakeTree: lifetime is not an excursion path");
    const std::size_t n = zeta.n_steps();
    const double dt = zeta.dt();
    std::vector<double> m(n), tau(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = zeta.values[i], b = zeta.values[i + 1];
        m[i] = sample_bridge_min_above(rng, a, b, dt, 0.0);
        tau[i] = sample_bridge_argmin(rng, a, b, dt, m[i]);
    }
    SnakeTree tree(rng, opt);
    tree.duration_ = zeta.duration;
    tree.origin_ = origin;
    tree.coarse_n_ = n;
    tree.build(zeta, m, tau);
    return tree;
}

void SnakeTree::build(const GridPath& zeta, const std::vector<double>& cell_min,
                      const std::vector<double>& cell_tau) {
    const std::size_t n = zeta.n_steps();
    const long double dt = static_cast<long double>(duration_) / static_cast<long double>(n);
    nodes_.clear();
    nodes_.reserve(3 * n + 1);
    nodes_.push_back({0.0, origin_, -1});
    pts_.assign(n + 1, Pt{});
    for (std::size_t i = 0; i <= n; ++i) {
        Pt& p = pts_[i];
        p.t = dt * static_cast<long double>(i);
        p.z = zeta.values[i];
        p.next = i < n ? static_cast<std::int32_t>(i + 1) : -1;
    }
    pts_[n].t = duration_;
    pts_[0].tip = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = cell_min[i];
        const std::int32_t j = insert_on_line(pts_[i].tip, m);
        const double b = pts_[i + 1].z;
        std::int32_t tip = j;
        if (b > nodes_[j].h) {
            const double v = nodes_[j].v + std::sqrt(b - nodes_[j].h) * rng_.normal();
            nodes_.push_back({b, v, j});
            tip = static_cast<std::int32_t>(nodes_.size() - 1);
        }
        pts_[i].m = m;
        pts_[i].tau = pts_[i].t + static_cast<long double>(cell_tau[i]);
        pts_[i].junction = j;
        pts_[i + 1].tip = tip;
    }
    pts_[n].m = 0.0;
    pts_[n].tau = pts_[n].t;
    pts_[n].junction = 0;
}

std::int32_t SnakeTree::insert_on_line(std::int32_t from, double h) {
    std::int32_t c = from;
    if (nodes_[c].h <= h) return c;
    while (true) {
        const std::int32_t p = nodes_[c].parent;
        const Node pn = nodes_[p];
        if (pn.h == h) return p;
        if (pn.h < h) {
            const Node cn = nodes_[c];
            const double span = cn.h - pn.h;
            const double w = (h - pn.h) / span;
            const double sd = std::sqrt(std::max(0.0, (h - pn.h) * (cn.h - h) / span));
            const double v = pn.v + w * (cn.v - pn.v) + sd * rng_.normal();
            nodes_.push_back({h, v, p});
            const auto id = static_cast<std::int32_t>(nodes_.size() - 1);
            nodes_[c].parent = id;
            return id;
        }
        c = p;
    }
}

bool SnakeTree::splittable(std::int32_t id) const noexcept {
    const Pt& p = pts_[id];
    if (p.next < 0) return false;
    return pts_[p.next].t - p.t > opt_.min_cell_fraction * static_cast<long double>(duration_);
}

std::int32_t SnakeTree::split(std::int32_t id) {
    return split_at(id, 0.5L * (pts_[id].t + pts_[pts_[id].next].t));
}

std::int32_t SnakeTree::split_at(std::int32_t id, long double t) {
    const Pt left = pts_[id];
    const Pt right = pts_[left.next];
    const double m = left.m;
    Pt mid{};
    mid.t = t;
    mid.next = left.next;
    Pt& lp = pts_[id];
    if (left.tau <= t) {
        mid.z = m + bes3_bridge_value(rng_, right.z - m, t - left.tau, right.t - left.tau);
        const double len = static_cast<double>(right.t - t);
        const double mr = sample_bridge_min_above(rng_, mid.z, right.z, len, m);
        mid.m = mr;
        mid.tau = t + static_cast<long double>(sample_bridge_argmin(rng_, mid.z, right.z, len, mr));
        mid.junction = insert_on_line(right.tip, mr);
        mid.tip = mid.junction;
        if (mid.z > mr) {
            const double v = nodes_[mid.junction].v + std::sqrt(mid.z - mr) * rng_.normal();
            nodes_.push_back({mid.z, v, mid.junction});
            mid.tip = static_cast<std::int32_t>(nodes_.size() - 1);
        }
    } else {
        mid.z = m + bes3_bridge_value(rng_, left.z - m, left.tau - t, left.tau - left.t);
        const double len = static_cast<double>(t - left.t);
        const double ml = sample_bridge_min_above(rng_, left.z, mid.z, len, m);
        const long double tl =
            left.t + static_cast<long double>(sample_bridge_argmin(rng_, left.z, mid.z, len, ml));
        const std::int32_t nl = insert_on_line(left.tip, ml);
        mid.tip = nl;
        if (mid.z > ml) {
            const double v = nodes_[nl].v + std::sqrt(mid.z - ml) * rng_.normal();
            nodes_.push_back({mid.z, v, nl});
            mid.tip = static_cast<std::int32_t>(nodes_.size() - 1);
        }
        mid.m = left.m;
        mid.tau = left.tau;
        mid.junction = left.junction;
        lp.m = ml;
        lp.tau = tl;
        lp.junction = nl;
    }
    pts_.push_back(mid);
    const auto nid = static_cast<std::int32_t>(pts_.size() - 1);
    pts_[id].next = nid;
    ++splits_;
    return nid;
}

double SnakeTree::envelope(std::int32_t id, double k) const noexcept {
    const Pt& a = pts_[id];
    const Pt& b = pts_[a.next];
    const double len = static_cast<double>(b.t - a.t);
    return k * std::sqrt(std::max(a.z, b.z) - a.m + std::sqrt(len));
}

double SnakeTree::cell_lower(std::int32_t id, double k) const noexcept {
    const Pt& a = pts_[id];
    const Pt& b = pts_[a.next];
    const double lo = std::min({nodes_[a.tip].v, nodes_[b.tip].v, nodes_[a.junction].v});
    return lo - envelope(id, k);
}

double SnakeTree::cell_upper(std::int32_t id, double k) const noexcept {
    const Pt& a = pts_[id];
    const Pt& b = pts_[a.next];
    const double hi = std::max({nodes_[a.tip].v, nodes_[b.tip].v, nodes_[a.junction].v});
    return hi + envelope(id, k);
}

SnakeTrajectory SnakeTree::coarse_trajectory() const {
    SnakeTrajectory w;
    w.duration = duration_;
    w.origin = origin_;
    w.zeta.resize(coarse_n_ + 1);
    w.tip.resize(coarse_n_ + 1);
    for (std::size_t i = 0; i <= coarse_n_; ++i) {
        w.zeta[i] = pts_[i].z;
        w.tip[i] = nodes_[pts_[i].tip].v;
    }
    return w;
}

std::vector<SnakeTree::Point> SnakeTree::points() const {
    std::vector<Point> out;
    out.reserve(pts_.size());
    for (std::int32_t id = 0; id >= 0; id = pts_[id].next)
        out.push_back({pts_[id].t, pts_[id].z, nodes_[pts_[id].tip].v});
    return out;
}

SnakeTree::Point SnakeTree::min_point() const noexcept {
    Point best{pts_[0].t, pts_[0].z, nodes_[pts_[0].tip].v};
    for (std::int32_t id = pts_[0].next; id >= 0; id = pts_[id].next) {
        const double v = nodes_[pts_[id].tip].v;
        if (v < best.tip) best = {pts_[id].t, pts_[id].z, v};
    }
    return best;
}

double SnakeTree::refine_minimum(double resolution) {
    using Entry = std::pair<double, std::int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    double cur = min_point().tip;
    for (std::int32_t id = 0; pts_[id].next >= 0; id = pts_[id].next)
        if (splittable(id)) heap.emplace(cell_lower(id), id);
    while (!heap.empty()) {
        const auto [lb, id] = heap.top();
        if (lb >= cur - resolution) break;
        heap.pop();
        const std::int32_t nid = split(id);
        cur = std::min(cur, nodes_[pts_[nid].tip].v);
        if (splittable(id)) heap.emplace(cell_lower(id), id);
        if (splittable(nid)) heap.emplace(cell_lower(nid), nid);
    }
    return cur;
}

bool SnakeTree::min_at_most(double level) {
    using Entry = std::pair<double, std::int32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    if (min_point().tip <= level) return true;
    for (std::int32_t id = 0; pts_[id].next >= 0; id = pts_[id].next)
        if (splittable(id) && cell_lower(id) <= level) heap.emplace(cell_lower(id), id);
    while (!heap.empty()) {
        const std::int32_t id = heap.top().second;
        heap.pop();
        const std::int32_t nid = split(id);
        if (nodes_[pts_[nid].tip].v <= level) return true;
        for (std::int32_t c : {id, nid})
            if (splittable(c) && cell_lower(c) <= level) heap.emplace(cell_lower(c), c);
    }
    return false;
}

void SnakeTree::refine_level_set(double level, long double max_cell) {
    std::vector<std::int32_t> work;
    auto wanted = [&](std::int32_t id) {
        const Pt& p = pts_[id];
        return p.next >= 0 && pts_[p.next].t - p.t > max_cell && splittable(id) &&
               cell_lower(id) <= level;
    };
    for (std::int32_t id = 0; pts_[id].next >= 0; id = pts_[id].next)
        if (wanted(id)) work.push_back(id);
    while (!work.empty()) {
        const std::int32_t id = work.back();
        work.pop_back();
        const std::int32_t nid = split(id);
        if (wanted(nid)) work.push_back(nid);
        if (wanted(id)) work.push_back(id);
    }
}

double SnakeTree::occupation_below(double level) const {
    long double total = 0.0L;
    for (std::int32_t id = 0; pts_[id].next >= 0; id = pts_[id].next) {
        const Pt& a = pts_[id];
        const Pt& b = pts_[a.next];
        const int k = (nodes_[a.tip].v <= level ? 1 : 0) + (nodes_[b.tip].v <= level ? 1 : 0);
        total += (b.t - a.t) * static_cast<long double>(k);
    }
    return static_cast<double>(total / 2.0L);
}

double SnakeTree::sample_occupation(double lo, double hi, long double max_cell) {
    long double total = 0.0L;
    std::vector<std::int32_t> work;
    for (std::int32_t id = 0; pts_[id].next >= 0; id = pts_[id].next) work.push_back(id);
    std::reverse(work.begin(), work.end());
    while (!work.empty()) {
        const std::int32_t id = work.back();
        work.pop_back();
        const long double len = pts_[pts_[id].next].t - pts_[id].t;
        const double lb = cell_lower(id, opt_.occupation_k);
        const double ub = cell_upper(id, opt_.occupation_k);
        if (ub < lo || lb > hi) continue;
        if (lb >= lo && ub <= hi) {
            total += len;
            continue;
        }
        if (len > max_cell && splittable(id)) {
            const std::int32_t nid = split(id);
            work.push_back(nid);
            work.push_back(id);
            continue;
        }
        const long double t = pts_[id].t + len * static_cast<long double>(rng_.uniform_open());
        double v;
        if (len > opt_.min_cell_fraction * static_cast<long double>(duration_) && t > pts_[id].t &&
            t < pts_[pts_[id].next].t)
            v = nodes_[pts_[split_at(id, t)].tip].v;
        else
            v = nodes_[pts_[id].tip].v;
        if (v >= lo && v <= hi) total += len;
    }
    return static_cast<double>(total);
}

double SnakeTree::tip_at(long double t) {
    if (t <= 0.0L) return nodes_[pts_[0].tip].v;
    std::int32_t id = 0;
    while (pts_[id].next >= 0 && pts_[pts_[id].next].t <= t) id = pts_[id].next;
    if (pts_[id].t == t || pts_[id].next < 0) return nodes_[pts_[id].tip].v;
    return nodes_[pts_[split_at(id, t)].tip].v;
}

void SnakeTree::refine_uniform(int levels) {
    for (int l = 0; l < levels; ++l) {
        std::vector<std::int32_t> ids;
        for (std::int32_t id = 0; pts_[id].next >= 0; id = pts_[id].next) ids.push_back(id);
        for (std::int32_t id : ids)
            if (splittable(id)) split(id);
    }
}

} // namespace bsphere
