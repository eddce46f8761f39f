#include "bsphere/spine.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "bsphere/analytic.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/parallel.hpp"

namespace bsphere {

double spine_atom_rate(double sigma_cut) {
    if (!(sigma_cut > 0.0)) throw ParameterError("spine: sigma_cut must be positive");
    return 4.0 * ito_tail(sigma_cut);
}

TruncationReport spine_truncation(double sigma_cut, double L) {
    TruncationReport t;
    t.sigma_cut = sigma_cut;
    t.dropped_rate_bound = spine_atom_rate(sigma_cut);
    // 4 L int_0^c (s/2) (2 sqrt(2 pi s^3))^-1 ds
    t.dropped_functional_bias_bound = 2.0 * L * std::sqrt(sigma_cut) / std::sqrt(2.0 * std::numbers::pi);
    return t;
}

SpineSample sample_spine(RandomStream& rng, double x, const SpineOptions& opt) {
    if (!(x > 0.0)) throw ParameterError("sample_spine: level must be positive");
    if (!(opt.grid_dt > 0.0)) throw ParameterError("sample_spine: grid_dt must be positive");
    if (opt.atom_grid_n < 2) throw ParameterError("sample_spine: atom grid needs at least 2 steps");
    const double rate = spine_atom_rate(opt.sigma_cut);

    const LastPassage lp = bessel9_last_passage(rng, x, opt.grid_dt, opt.last_passage);
    SpineSample s;
    s.level_x = x;
    s.spine = lp.path;
    s.L_x = lp.last_passage_time;
    s.sigma_cut = opt.sigma_cut;

    const auto cells = static_cast<std::size_t>(std::ceil(s.L_x / opt.grid_dt));
    s.cell_counts.assign(cells, 0);
    for (std::size_t i = 0; i < cells; ++i) {
        const double t0 = static_cast<double>(i) * opt.grid_dt;
        const double len = std::min(opt.grid_dt, s.L_x - t0);
        if (!(len > 0.0)) continue;
        const auto k = rng.poisson(rate * len);
        s.cell_counts[i] = static_cast<std::uint32_t>(k);
        for (std::uint64_t a = 0; a < k; ++a) {
            const double t = t0 + rng.uniform() * len;
            const double u = lp.radius_at(rng, t);
            const double v = rng.uniform_open();
            const double sigma = opt.sigma_cut / (v * v);
            SnakeTree tree = SnakeTree::sample(rng.split(), opt.atom_grid_n, sigma, u, opt.atom_tree);
            ++s.proposed;
            if (tree.min_at_most(0.0)) continue;
            ++s.accepted;
            s.atoms.push_back({t, u, sigma, tree.coarse_trajectory()});
        }
    }
    if (s.proposed >= opt.acceptance_min_proposals &&
        static_cast<double>(s.accepted) < opt.acceptance_floor * static_cast<double>(s.proposed)) {
        std::ostringstream msg;
        msg << "sample_spine: acceptance " << s.accepted << "/" << s.proposed << " below floor "
            << opt.acceptance_floor << " (level " << x << ", L " << s.L_x << ")";
        throw ResourceError(msg.str());
    }
    return s;
}

double functional_sigma(const SpineSample& s, double min_sigma) {
    double total = 0.0;
    for (const auto& a : s.atoms)
        if (a.duration >= min_sigma) total += a.duration;
    return total;
}

double functional_occupation(const SpineSample& s, double eps) {
    if (eps < 0.0) throw ParameterError("functional_occupation: eps must be >= 0");
    double total = 0.0;
    for (const auto& a : s.atoms) total += occupation_below(a.trajectory, eps);
    return total;
}

TailTable conditional_tail_experiment(std::uint64_t root_seed, double x, double eps,
                                      const std::vector<double>& u_grid, const TailOptions& opt) {
    if (!(eps > 0.0)) throw ParameterError("conditional_tail_experiment: eps must be positive");
    if (x < 2.0 * eps || x > 3.0 * eps)
        throw ParameterError("conditional_tail_experiment: x must lie in [2 eps, 3 eps]");
    if (opt.strata == 0 || opt.replicas < 2 * opt.strata)
        throw ParameterError("conditional_tail_experiment: need at least two replicas per stratum");
    if (!(opt.window_lo > 0.0) || !(opt.window_hi > opt.window_lo))
        throw ParameterError("conditional_tail_experiment: bad duration window");
    for (std::size_t k = 1; k < u_grid.size(); ++k)
        if (u_grid[k] <= u_grid[k - 1])
            throw ParameterError("conditional_tail_experiment: u grid must be increasing");

    const double e4 = eps * eps * eps * eps;
    const double lo = opt.window_lo * e4;
    const double ratio = opt.window_hi / opt.window_lo;
    auto edge = [&](std::size_t k) {
        return lo * std::pow(ratio, static_cast<double>(k) / static_cast<double>(opt.strata));
    };

    struct Rep {
        double weight = 0.0;  // 0 unless 0 < W* <= eps
        double occupation = 0.0;
    };
    const auto reps = parallel_map(opt.replicas, opt.workers, [&](std::size_t r) {
        RandomStream rng(root_seed, r);
        const std::size_t k = r % opt.strata;
        const double a = edge(k), b = edge(k + 1);
        const double sigma = a + rng.uniform() * (b - a);
        SnakeTree tree = SnakeTree::sample(rng.split(), opt.coarse_n, sigma, x);
        Rep out;
        if (tree.min_at_most(0.0) || !tree.min_at_most(eps)) return out;
        const long double cell = std::min<long double>(sigma, e4) / 256.0L;
        tree.refine_level_set(eps, cell);
        out.weight = (b - a) * ito_density(sigma);
        out.occupation = tree.occupation_below(eps);
        return out;
    });

    // per-stratum sums
    std::vector<double> n_k(opt.strata, 0.0);
    for (std::size_t r = 0; r < reps.size(); ++r) n_k[r % opt.strata] += 1.0;
    auto stratified_mean = [&](auto&& value) {
        std::vector<double> mean(opt.strata, 0.0);
        for (std::size_t r = 0; r < reps.size(); ++r) mean[r % opt.strata] += value(reps[r]);
        double total = 0.0;
        for (std::size_t k = 0; k < opt.strata; ++k) total += mean[k] / n_k[k];
        return total;
    };
    auto stratified_var = [&](auto&& value) {
        std::vector<double> s1(opt.strata, 0.0), s2(opt.strata, 0.0);
        for (std::size_t r = 0; r < reps.size(); ++r) {
            const double v = value(reps[r]);
            s1[r % opt.strata] += v;
            s2[r % opt.strata] += v * v;
        }
        double var = 0.0;
        for (std::size_t k = 0; k < opt.strata; ++k) {
            const double m = s1[k] / n_k[k];
            var += std::max(0.0, s2[k] / n_k[k] - m * m) / (n_k[k] - 1.0);
        }
        return var;
    };

    TailTable table;
    table.x = x;
    table.eps = eps;
    table.replicas = opt.replicas;
    for (const auto& rep : reps)
        if (rep.weight > 0.0) ++table.accepted;
    table.mass_exact = 1.5 * (1.0 / ((x - eps) * (x - eps)) - 1.0 / (x * x));
    table.mass_estimate = stratified_mean([](const Rep& p) { return p.weight; });

    std::vector<std::pair<double, double>> fit_points;
    for (double u : u_grid) {
        const double thr = u * e4;
        TailRow row;
        row.u = u;
        for (const auto& rep : reps)
            if (rep.weight > 0.0 && rep.occupation > thr) ++row.exceed;
        if (table.mass_estimate > 0.0) {
            const double num = stratified_mean(
                [&](const Rep& p) { return p.occupation > thr ? p.weight : 0.0; });
            row.probability = num / table.mass_estimate;
            const double pr = row.probability;
            const double var = stratified_var([&](const Rep& p) {
                return p.weight * ((p.occupation > thr ? 1.0 : 0.0) - pr);
            });
            const double se = std::sqrt(var) / table.mass_estimate;
            row.ci_low = std::max(0.0, pr - 1.96 * se);
            row.ci_high = std::min(1.0, pr + 1.96 * se);
        }
        row.flagged = row.exceed < opt.min_tail_samples;
        if (row.flagged) {
            // Garwood interval on the exceedance count, scaled to the estimate
            const double c = static_cast<double>(row.exceed);
            const double hi = 0.5 * boost::math::quantile(boost::math::chi_squared(2.0 * c + 2.0), 0.975);
            if (row.exceed == 0) {
                row.ci_low = 0.0;
                row.ci_high = std::min(1.0, hi / std::max<double>(1.0, static_cast<double>(table.accepted)));
            } else {
                const double lo_c = 0.5 * boost::math::quantile(boost::math::chi_squared(2.0 * c), 0.025);
                row.ci_low = std::min(row.ci_low, row.probability * lo_c / c);
                row.ci_high = std::min(1.0, std::max(row.ci_high, row.probability * hi / c));
            }
        }
        if (u > 0.0 && !row.flagged && row.probability > 0.0)
            fit_points.emplace_back(u, std::log(row.probability));
        table.rows.push_back(row);
    }
    if (fit_points.size() >= 2) table.fit = linear_fit(std::move(fit_points));
    return table;
}

} // namespace bsphere
