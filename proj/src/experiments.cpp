#include "bsphere/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "bsphere/analytic.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/parallel.hpp"
#include "bsphere/paths.hpp"

namespace bsphere {

std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view label) noexcept {
    return RandomStream(root_seed, fnv1a64(label)).output(0);
}

SnakeTrajectory sample_normalized_snake(RandomStream& rng, std::size_t n, const TipOptions& tips) {
    const GridPath zeta = sample_normalized_excursion(rng, n);
    return sample_tips(rng, zeta, 0.0, tips);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> log_edges(double a, double b, std::size_t strata) {
    std::vector<double> e(strata + 1);
    for (std::size_t k = 0; k <= strata; ++k)
        e[k] = a * std::pow(b / a, static_cast<double>(k) / static_cast<double>(strata));
    e.front() = a;
    e.back() = b;
    return e;
}

/// Stratified mean and standard error; replica r belongs to stratum r mod strata.
std::pair<double, double> stratified(const std::vector<double>& v, std::size_t strata) {
    std::vector<double> s1(strata, 0.0), s2(strata, 0.0), n(strata, 0.0);
    for (std::size_t r = 0; r < v.size(); ++r) {
        s1[r % strata] += v[r];
        s2[r % strata] += v[r] * v[r];
        n[r % strata] += 1.0;
    }
    double mean = 0.0, var = 0.0;
    for (std::size_t k = 0; k < strata; ++k) {
        const double m = s1[k] / n[k];
        mean += m;
        var += std::max(0.0, (s2[k] - n[k] * m * m) / (n[k] - 1.0)) / n[k];
    }
    return {mean, std::sqrt(var)};
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t c) {
    std::vector<double> out(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out[r] = rows[r][c];
    return out;
}

double factorial(int p) {
    double f = 1.0;
    for (int k = 2; k <= p; ++k) f *= k;
    return f;
}

double tip_range(const SnakeTrajectory& w) {
    const auto [lo, hi] = std::minmax_element(w.tip.begin(), w.tip.end());
    return *hi - *lo;
}

double max_zeta(const SnakeTrajectory& w) { return *std::max_element(w.zeta.begin(), w.zeta.end()); }

KsRow ks_row(std::string name, const std::vector<double>& a, const std::vector<double>& b) {
    KsRow row;
    row.functional = std::move(name);
    row.mean_a = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
    row.mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
    row.ks = ks_two_sample(a, b);
    return row;
}

} // namespace

// N functionals -------------------------------------------------------------------

std::vector<EstimateReport> estimate_N_functional(const ExperimentContext& ctx, double x,
                                                  const NFunctional& functional,
                                                  const WindowOptions& window, std::size_t replicas) {
    if (!(window.a > 0.0) || !(window.b > window.a))
        throw ParameterError("estimate_N_functional: degenerate window");
    if (window.strata == 0 || replicas < 2 * window.strata)
        throw ParameterError("estimate_N_functional: need at least two replicas per stratum");
    const auto edges = log_edges(window.a, window.b, window.strata);
    const auto values = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        const std::size_t k = r % window.strata;
        const DurationSample d = sample_duration(rng, edges[k], edges[k + 1]);
        SnakeTree tree = SnakeTree::sample(rng.split(), window.coarse_n, d.duration, x, window.tree);
        std::vector<double> f = functional.eval(tree);
        if (f.size() != functional.names.size())
            throw ContractError("estimate_N_functional: functional returned a wrong number of values");
        for (double& v : f) v *= d.importance_weight;
        return f;
    });
    std::vector<EstimateReport> out;
    for (std::size_t c = 0; c < functional.names.size(); ++c) {
        const auto [mean, se] = stratified(column(values, c), window.strata);
        EstimateReport rep = make_report(functional.names[c], mean, se, replicas, ctx.root_seed);
        rep.window_tail_mass = ito_tail(window.b);
        rep.config_hash = ctx.config_hash;
        out.push_back(std::move(rep));
    }
    return out;
}

NFunctional functional_one() {
    return {{"one"}, [](SnakeTree&) { return std::vector<double>{1.0}; }};
}

NFunctional functional_min_below(double level) {
    return {{"min_below"},
            [level](SnakeTree& t) { return std::vector<double>{t.min_at_most(level) ? 1.0 : 0.0}; }};
}

NFunctional functional_positive_occupation(double eps, double cells_per_unit) {
    if (!(eps > 0.0)) throw ParameterError("functional_positive_occupation: eps must be positive");
    return {{"occupation", "occupation_sq"}, [eps, cells_per_unit](SnakeTree& t) {
                if (!t.min_at_most(eps) || t.min_at_most(0.0)) return std::vector<double>{0.0, 0.0};
                const long double cell = static_cast<long double>(t.duration()) / cells_per_unit;
                const double a = t.sample_occupation(kNegInf, eps, cell);
                const double b = t.sample_occupation(kNegInf, eps, cell);
                return std::vector<double>{0.5 * (a + b), a * b};
            }};
}

// Moments ------------------------------------------------------------------------

MomentScaling moment_scaling(const ExperimentContext& ctx, const std::vector<int>& p_list,
                             const std::vector<double>& eps_list, std::size_t replicas,
                             const MomentOptions& opt) {
    if (p_list.empty() || eps_list.size() < 2) throw ParameterError("moment_scaling: empty p or eps list");
    for (int p : p_list)
        if (p < 1 || p > 4) throw ParameterError("moment_scaling: p must lie in 1..4");
    for (double e : eps_list)
        if (!(e > 0.0)) throw ParameterError("moment_scaling: eps must be positive");
    if (replicas < 2) throw ParameterError("moment_scaling: need at least two replicas");
    const int pmax = *std::max_element(p_list.begin(), p_list.end());
    const double eps_min = *std::min_element(eps_list.begin(), eps_list.end());

    // values[r][e * pmax + (p - 1)]
    const auto values = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        SnakeTree tree = SnakeTree::sample(rng.split(), opt.coarse_n, 1.0, 0.0, opt.tree);
        const double w_min = tree.refine_minimum(1e-3 * eps_min);
        std::vector<double> v(eps_list.size() * static_cast<std::size_t>(pmax));
        for (std::size_t e = 0; e < eps_list.size(); ++e) {
            const double eps = eps_list[e];
            const long double cell = static_cast<long double>(std::pow(eps, 4) * opt.cell_factor);
            double prod = 1.0;
            for (int p = 1; p <= pmax; ++p) {
                const double a = tree.sample_occupation(kNegInf, w_min + eps, cell);
                if (a > 1.0 + 1e-12) throw ContractError("moment_scaling: occupation exceeds the duration");
                prod *= a;
                v[e * static_cast<std::size_t>(pmax) + static_cast<std::size_t>(p - 1)] = prod;
            }
        }
        return v;
    });

    MomentScaling out;
    out.p_list = p_list;
    const std::size_t half = replicas / 2;
    for (int p : p_list) {
        std::vector<std::pair<double, double>> pts;
        double sup = 0.0, sup_half = 0.0;
        for (std::size_t e = 0; e < eps_list.size(); ++e) {
            const std::size_t c = e * static_cast<std::size_t>(pmax) + static_cast<std::size_t>(p - 1);
            const auto col = column(values, c);
            MomentRow row;
            row.p = p;
            row.eps = eps_list[e];
            row.report = summarize("moment_p" + std::to_string(p), col, ctx.root_seed);
            row.report.config_hash = ctx.config_hash;
            const double norm = factorial(p) * std::pow(eps_list[e], 4.0 * p);
            row.normalized = row.report.estimate / norm;
            const double half_mean =
                std::accumulate(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(half), 0.0) /
                static_cast<double>(half);
            row.dropped = !(row.report.estimate > 0.0);
            if (!row.dropped) {
                pts.emplace_back(std::log(eps_list[e]), std::log(row.report.estimate));
                sup = std::max(sup, row.normalized);
                sup_half = std::max(sup_half, half_mean / norm);
            }
            out.rows.push_back(row);
        }
        out.fits.push_back(pts.size() >= 2 ? linear_fit(pts) : FitReport{});
        out.sup_normalized.push_back(sup);
        out.sup_normalized_half.push_back(sup_half);
    }
    return out;
}

LilSummary lil_statistic(const ExperimentContext& ctx, int k_lo, int k_hi, std::size_t replicas,
                         const MomentOptions& opt) {
    if (k_lo < 3 || k_hi > 12 || k_hi < k_lo) throw ParameterError("lil_statistic: k range must lie in 3..12");
    if (replicas == 0) throw ParameterError("lil_statistic: no replicas");
    LilSummary out;
    out.k_lo = k_lo;
    out.running_max = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        SnakeTree tree = SnakeTree::sample(rng.split(), opt.coarse_n, 1.0, 0.0, opt.tree);
        const double w_min = tree.refine_minimum(1e-3 * std::ldexp(1.0, -k_hi));
        std::vector<double> run;
        double best = 0.0;
        for (int k = k_lo; k <= k_hi; ++k) {
            const double eps = std::ldexp(1.0, -k);
            const long double cell = static_cast<long double>(std::pow(eps, 4) * opt.cell_factor);
            const double v = tree.sample_occupation(kNegInf, w_min + eps, cell);
            best = std::max(best, v / gauge_h(eps));
            run.push_back(best);
        }
        return run;
    });
    for (int k = k_lo; k <= k_hi; ++k) {
        const auto col = column(out.running_max, static_cast<std::size_t>(k - k_lo));
        out.rows.push_back({k, quantile(col, 0.5), quantile(col, 0.9), quantile(col, 0.99),
                            *std::max_element(col.begin(), col.end())});
    }
    return out;
}

// Distributional tests ----------------------------------------------------------------

std::vector<KsRow> reroot_invariance_test(const ExperimentContext& ctx, double s_fixed,
                                          std::size_t replicas, std::size_t n) {
    if (!(s_fixed > 0.0 && s_fixed < 1.0)) throw ParameterError("reroot_invariance_test: s must lie in (0, 1)");
    if (replicas < 2) throw ParameterError("reroot_invariance_test: need at least two replicas");
    const auto r_index = static_cast<std::size_t>(std::llround(s_fixed * static_cast<double>(n)));
    auto features = [](const SnakeTrajectory& w) {
        return std::array<double, 4>{w.duration, v_epsilon(w, 0.25), tip_range(w), max_zeta(w)};
    };
    auto sample = [n](RandomStream& rng) { return sample_tips(rng, sample_dyck_excursion(rng, n, 1.0), 0.0); };
    const auto arm_a = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        return features(sample(rng));
    });
    const auto arm_b = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, replicas + r);
        return features(reroot(sample(rng), r_index));
    });
    const std::array<const char*, 4> names{"duration", "v_quarter", "tip_range", "max_zeta"};
    std::vector<KsRow> rows;
    for (std::size_t c = 0; c < names.size(); ++c) {
        std::vector<double> a(replicas), b(replicas);
        for (std::size_t r = 0; r < replicas; ++r) {
            a[r] = arm_a[r][c];
            b[r] = arm_b[r][c];
        }
        rows.push_back(ks_row(names[c], a, b));
    }
    return rows;
}

ScalingTest scaling_pushforward_test(const ExperimentContext& ctx, double lambda, std::size_t replicas,
                                     std::size_t n, double eps) {
    if (!(lambda > 0.0)) throw ParameterError("scaling_pushforward_test: lambda must be positive");
    if (replicas < 2) throw ParameterError("scaling_pushforward_test: need at least two replicas");
    const double target = lambda * lambda;
    auto features = [eps](const SnakeTrajectory& w) {
        return std::array<double, 5>{w.duration, max_zeta(w), tip_range(w), w_star(w).value,
                                     v_epsilon(w, eps)};
    };
    const auto arm_a = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        return features(rescale(sample_normalized_snake(rng, n), lambda));
    });
    const auto arm_b = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, replicas + r);
        const GridPath zeta = sample_excursion(rng, n, target);
        return features(sample_tips(rng, zeta, 0.0));
    });
    ScalingTest out;
    for (const auto& f : arm_a)
        if (f[0] != target) out.sigma_exact = false;
    const std::array<const char*, 4> names{"max_zeta", "tip_range", "w_star", "v_eps"};
    for (std::size_t c = 0; c < names.size(); ++c) {
        std::vector<double> a(replicas), b(replicas);
        for (std::size_t r = 0; r < replicas; ++r) {
            a[r] = arm_a[r][c + 1];
            b[r] = arm_b[r][c + 1];
        }
        out.rows.push_back(ks_row(names[c], a, b));
    }
    return out;
}

// Hölder ---------------------------------------------------------------------------------

double holder_modulus(const SnakeTrajectory& w, double exponent) {
    const std::size_t n = w.n_steps();
    if (n < 2) throw ParameterError("holder_modulus: need at least two steps");
    const double dt = w.dt();
    double best = 0.0;
    for (std::size_t lag = 1; lag <= n / 2; lag *= 2) {
        const double h = static_cast<double>(lag) * dt;
        const double denom = (1.0 + std::log(1.0 / h)) * std::pow(h, exponent);
        double m = 0.0;
        for (std::size_t i = 0; i + lag <= n; ++i) m = std::max(m, std::abs(w.tip[i + lag] - w.tip[i]));
        best = std::max(best, m / denom);
    }
    return best;
}

HolderTable holder_statistic(const ExperimentContext& ctx, const std::vector<std::size_t>& n_ladder,
                             std::size_t replicas) {
    if (n_ladder.empty()) throw ParameterError("holder_statistic: empty ladder");
    for (std::size_t k = 1; k < n_ladder.size(); ++k)
        if (n_ladder[k] <= n_ladder[k - 1] || n_ladder.back() % n_ladder[k - 1] != 0)
            throw ParameterError("holder_statistic: ladder must increase and divide the finest n");
    const std::size_t n_max = n_ladder.back();
    struct Rep {
        std::vector<double> stat, control;
    };
    const auto reps = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        const GridPath zeta = sample_excursion(rng, n_max, 1.0);
        const SnakeTrajectory fine = sample_tips(rng, zeta, 0.0, {.exact_bridge_min = true});
        Rep out;
        for (std::size_t n : n_ladder) {
            const std::size_t stride = n_max / n;
            SnakeTrajectory w;
            w.duration = fine.duration;
            w.origin = fine.origin;
            for (std::size_t i = 0; i <= n; ++i) {
                w.zeta.push_back(fine.zeta[i * stride]);
                w.tip.push_back(fine.tip[i * stride]);
            }
            out.stat.push_back(holder_modulus(w, 0.25));
            out.control.push_back(holder_modulus(w, 1.0 / 3.0));
        }
        return out;
    });
    HolderTable t;
    t.n_ladder = n_ladder;
    for (const auto& r : reps) {
        t.stat.push_back(r.stat);
        t.control.push_back(r.control);
    }
    for (std::size_t k = 1; k < n_ladder.size(); ++k) {
        std::vector<double> ratio, cratio;
        for (const auto& r : reps) {
            ratio.push_back(r.stat[k] / r.stat[k - 1]);
            cratio.push_back(r.control[k] / r.control[k - 1]);
        }
        t.median_ratio.push_back(median(ratio));
        t.control_median_ratio.push_back(median(cratio));
    }
    return t;
}

// Dimension --------------------------------------------------------------------------------

DimensionResult dimension_estimate(const ExperimentContext& ctx, const std::vector<double>& eps_list,
                                   std::size_t replicas, std::size_t n, const MomentOptions& opt) {
    if (eps_list.size() < 2) throw ParameterError("dimension_estimate: need at least two eps values");
    if (replicas < 2) throw ParameterError("dimension_estimate: need at least two replicas");
    const double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
    const std::size_t m = eps_list.size();
    // values[r][e] = V_eps, values[r][m + e] = band volume
    const auto values = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        SnakeTree tree = SnakeTree::sample(rng.split(), n, 1.0, 0.0, opt.tree);
        const long double u = rng.uniform();
        // V_eps is unchanged by re-rooting at u; the ball is centred at the
        // distinguished point of the re-rooted snake.
        const double w_min = tree.refine_minimum(1e-3 * eps_min);
        const double tip_u = tree.tip_at(u);
        std::vector<double> v(2 * m);
        for (std::size_t e = 0; e < m; ++e) {
            const double eps = eps_list[e];
            const long double cell = static_cast<long double>(std::pow(eps, 4) * opt.cell_factor);
            v[e] = tree.sample_occupation(kNegInf, w_min + eps, cell);
            v[m + e] = tree.sample_occupation(tip_u - eps, tip_u + eps, 1.0L / static_cast<long double>(n));
        }
        return v;
    });
    DimensionResult out;
    std::vector<std::pair<double, double>> pts, half_pts, control_pts;
    const std::size_t half = replicas / 2;
    for (std::size_t e = 0; e < m; ++e) {
        const auto col = column(values, e);
        auto rep = summarize("v_eps", col, ctx.root_seed);
        rep.config_hash = ctx.config_hash;
        const auto ctl_col = column(values, m + e);
        auto ctl = summarize("label_band", ctl_col, ctx.root_seed);
        ctl.config_hash = ctx.config_hash;
        const double half_mean =
            std::accumulate(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(half), 0.0) /
            static_cast<double>(half);
        const double le = std::log(eps_list[e]);
        if (rep.estimate > 0.0) pts.emplace_back(le, std::log(rep.estimate));
        if (half_mean > 0.0) half_pts.emplace_back(le, std::log(half_mean));
        if (ctl.estimate > 0.0) control_pts.emplace_back(le, std::log(ctl.estimate));
        out.points.push_back(std::move(rep));
        out.control.push_back(std::move(ctl));
    }
    if (pts.size() >= 2) out.fit = linear_fit(pts);
    if (half_pts.size() >= 2) out.fit_half = linear_fit(half_pts);
    if (control_pts.size() >= 2) out.control_fit = linear_fit(control_pts);
    return out;
}

// Bessel absolute continuity ---------------------------------------------------------------

namespace {

struct CellValue {
    double survival;
    double integral;
};

// Survival of a Brownian bridge a -> b over h above 0 and the integral of B^-2,
// bisecting cells that come close to 0.
CellValue killed_cell(RandomStream& rng, double a, double b, double h, int depth,
                      const BesselAcOptions& opt) {
    if (a <= 0.0 || b <= 0.0) return {0.0, 0.0};
    if (depth == 0 || std::min(a, b) > opt.refine_factor * std::sqrt(h))
        return {-std::expm1(-2.0 * a * b / h), 0.5 * h * (1.0 / (a * a) + 1.0 / (b * b))};
    const double mid = 0.5 * (a + b) + 0.5 * std::sqrt(h) * rng.normal();
    if (mid <= 0.0) return {0.0, 0.0};
    const CellValue l = killed_cell(rng, a, mid, 0.5 * h, depth - 1, opt);
    if (l.survival == 0.0) return l;
    const CellValue r = killed_cell(rng, mid, b, 0.5 * h, depth - 1, opt);
    return {l.survival * r.survival, l.integral + r.integral};
}

} // namespace

std::vector<BesselAcRow> bessel_ac_test(const ExperimentContext& ctx, double x, double t,
                                        const std::vector<TestSet>& sets, std::size_t replicas,
                                        const BesselAcOptions& opt) {
    if (!(x > 0.0) || !(t > 0.0)) throw ParameterError("bessel_ac_test: x and t must be positive");
    if (!(opt.dt > 0.0) || opt.dt > t) throw ParameterError("bessel_ac_test: bad dt");
    if (sets.empty() || replicas < 2) throw ParameterError("bessel_ac_test: need test sets and replicas");
    const auto coarse_steps = static_cast<std::size_t>(std::llround(t / opt.dt));
    const double h_coarse = t / static_cast<double>(coarse_steps);
    const double h_fine = 0.5 * h_coarse;
    const std::size_t k = sets.size();
    auto in = [&](std::size_t s, double v) { return v >= sets[s].lo && v <= sets[s].hi; };

    // left[r] = {fine weights per set, coarse weights per set}
    const auto left = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        RandomStream refine = rng.split();
        std::vector<double> path(2 * coarse_steps + 1);
        path[0] = x;
        const double sd = std::sqrt(h_fine);
        for (std::size_t i = 1; i < path.size(); ++i) path[i] = path[i - 1] + sd * rng.normal();
        std::vector<double> out(2 * k, 0.0);
        double s_f = 1.0, i_f = 0.0, s_c = 1.0, i_c = 0.0;
        for (std::size_t i = 0; i + 1 < path.size() && s_f > 0.0; ++i) {
            const CellValue c = killed_cell(refine, path[i], path[i + 1], h_fine, opt.refine_depth, opt);
            s_f *= c.survival;
            i_f += c.integral;
        }
        for (std::size_t i = 0; i + 2 < path.size() && s_c > 0.0; i += 2) {
            const CellValue c = killed_cell(refine, path[i], path[i + 2], h_coarse, opt.refine_depth, opt);
            s_c *= c.survival;
            i_c += c.integral;
        }
        const double end = path.back();
        const double wf = s_f * std::exp(-6.0 * i_f);
        const double wc = s_c * std::exp(-6.0 * i_c);
        for (std::size_t s = 0; s < k; ++s) {
            if (!in(s, end)) continue;
            out[s] = wf;
            out[k + s] = wc;
        }
        return out;
    });
    const auto right = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, replicas + r);
        const double st = std::sqrt(t);
        double r2 = 0.0;
        for (int c = 0; c < 9; ++c) {
            const double z = (c == 0 ? x : 0.0) + st * rng.normal();
            r2 += z * z;
        }
        const double rad = std::sqrt(r2);
        std::vector<double> out(k, 0.0);
        const double x4 = x * x * x * x;
        for (std::size_t s = 0; s < k; ++s)
            if (in(s, rad)) out[s] = x4 / (r2 * r2);
        return out;
    });

    std::vector<BesselAcRow> rows;
    for (std::size_t s = 0; s < k; ++s) {
        BesselAcRow row;
        row.set = sets[s];
        row.left = summarize("left_" + sets[s].name, column(left, s), ctx.root_seed);
        row.left_coarse = summarize("left_coarse_" + sets[s].name, column(left, k + s), ctx.root_seed);
        row.right = summarize("right_" + sets[s].name, column(right, s), ctx.root_seed);
        for (auto* rep : {&row.left, &row.left_coarse, &row.right}) rep->config_hash = ctx.config_hash;
        const double tol = 1.96 * std::hypot(row.left.std_error, row.right.std_error);
        row.agree = std::abs(row.left.estimate - row.right.estimate) <= tol;
        row.sensitivity_flag = std::abs(row.left.estimate - row.left_coarse.estimate) > row.left.std_error;
        rows.push_back(std::move(row));
    }
    return rows;
}

// Spine ------------------------------------------------------------------------------------

SpineClgResult spine_clg_experiment(const ExperimentContext& ctx, double x, std::size_t replicas,
                                    const SpineOptions& opt) {
    if (replicas < 2) throw ParameterError("spine_clg_experiment: need at least two replicas");
    SpineOptions quarter = opt;
    quarter.sigma_cut = opt.sigma_cut / 4.0;
    // {f at cut, f at cut/4, L, proposed, accepted}
    const auto values = parallel_map(replicas, ctx.workers, [&](std::size_t r) {
        RandomStream rng(ctx.root_seed, r);
        const SpineSample s = sample_spine(rng, x, quarter);
        return std::array<double, 5>{-std::expm1(-0.5 * functional_sigma(s, opt.sigma_cut)),
                                     -std::expm1(-0.5 * functional_sigma(s)), s.L_x,
                                     static_cast<double>(s.proposed), static_cast<double>(s.accepted)};
    });
    std::array<std::vector<double>, 5> cols;
    for (const auto& v : values)
        for (std::size_t c = 0; c < 5; ++c) cols[c].push_back(v[c]);
    SpineClgResult out;
    out.target = clg_value(x);
    out.mean_L = std::accumulate(cols[2].begin(), cols[2].end(), 0.0) / static_cast<double>(replicas);
    const double proposed = std::accumulate(cols[3].begin(), cols[3].end(), 0.0);
    const double accepted = std::accumulate(cols[4].begin(), cols[4].end(), 0.0);
    out.acceptance = proposed > 0.0 ? accepted / proposed : 1.0;
    out.mean_atoms = accepted / static_cast<double>(replicas);
    out.at_cut = summarize("clg_cut", cols[0], ctx.root_seed);
    out.at_cut.truncation = spine_truncation(opt.sigma_cut, out.mean_L);
    out.at_cut.config_hash = ctx.config_hash;
    out.at_quarter = summarize("clg_quarter", cols[1], ctx.root_seed);
    out.at_quarter.truncation = spine_truncation(quarter.sigma_cut, out.mean_L);
    out.at_quarter.config_hash = ctx.config_hash;
    const double bias = out.at_cut.truncation->dropped_functional_bias_bound;
    out.covers = out.target >= out.at_cut.ci95.first && out.target <= out.at_cut.ci95.second + bias;
    out.moves_toward =
        std::abs(out.at_quarter.estimate - out.target) < std::abs(out.at_cut.estimate - out.target);
    return out;
}

// Metric -----------------------------------------------------------------------------------

MetricValidation metric_validation(const ExperimentContext& ctx, std::size_t trajectories, std::size_t n,
                                   const std::vector<std::size_t>& m_ladder, std::size_t star_targets,
                                   std::size_t random_pairs, double ident_tol_factor,
                                   const std::vector<SnakeTrajectory>& given) {
    if (!given.empty()) trajectories = given.size();
    if (trajectories == 0) throw ParameterError("metric_validation: no trajectories");
    if (m_ladder.empty()) throw ParameterError("metric_validation: empty anchor ladder");
    struct Rep {
        std::vector<MetricRow> rows;
        std::vector<double> gaps;
        double max_increase = -std::numeric_limits<double>::infinity();
        bool bracket_ok = true;
    };
    const auto reps = parallel_map(trajectories, ctx.workers, [&](std::size_t tr) {
        RandomStream rng(ctx.root_seed, tr);
        const SnakeTrajectory w = given.empty() ? sample_normalized_snake(rng, n) : given[tr];
        const std::size_t n = w.n_steps();
        const ArgMin star = w_star(w);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        auto index = [&] { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n + 1)) % (n + 1); };
        for (std::size_t k = 0; k < star_targets; ++k) pairs.emplace_back(star.index, index());
        for (std::size_t k = 0; k < random_pairs; ++k) pairs.emplace_back(index(), index());
        const double tol = ident_tol_factor * std::sqrt(w.dt());
        Rep out;
        out.rows = refine_and_compare(w, m_ladder, pairs, tol);
        const std::size_t p = pairs.size();
        for (std::size_t l = 0; l < m_ladder.size(); ++l)
            for (std::size_t q = 0; q < p; ++q) {
                const MetricRow& row = out.rows[l * p + q];
                if (row.estimate < row.lower - 1e-12 || row.estimate > row.upper + 1e-12) out.bracket_ok = false;
                if (l > 0) out.max_increase = std::max(out.max_increase, row.estimate - out.rows[(l - 1) * p + q].estimate);
            }
        const std::size_t last = (m_ladder.size() - 1) * p;
        for (std::size_t q = 0; q < star_targets; ++q) {
            const MetricRow& row = out.rows[last + q];
            const double exact = w.tip[row.j] - star.value;
            if (exact > 0.0) out.gaps.push_back((row.estimate - exact) / exact);
        }
        return out;
    });
    MetricValidation v;
    v.max_ladder_increase = -std::numeric_limits<double>::infinity();
    for (const auto& r : reps) {
        v.rows.push_back(r.rows);
        v.star_gaps.insert(v.star_gaps.end(), r.gaps.begin(), r.gaps.end());
        v.max_ladder_increase = std::max(v.max_ladder_increase, r.max_increase);
        v.bracket_ok = v.bracket_ok && r.bracket_ok;
    }
    v.median_star_gap = v.star_gaps.empty() ? 0.0 : median(v.star_gaps);
    return v;
}

} // namespace bsphere
