#include "bsphere/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "bsphere/analytic.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/experiments.hpp"
#include "bsphere/io.hpp"
#include "bsphere/spine.hpp"

namespace bsphere {

namespace {

constexpr const char* kVersion = "1.0.0";

std::vector<double> default_eps_list() {
    return {std::ldexp(1.0, -6), std::ldexp(1.0, -5), std::ldexp(1.0, -4), std::ldexp(1.0, -3),
            std::ldexp(1.0, -2)};
}

template <class T>
T or_default(T v, T d) {
    return v == T{} ? d : v;
}

std::string b2s(bool b) { return b ? "1" : "0"; }

// CSV bodies -----------------------------------------------------------------------

std::string estimates_csv(const std::vector<EstimateReport>& reports) {
    std::ostringstream os;
    CsvWriter csv(os, estimate_csv_header());
    for (const auto& r : reports) csv.row(estimate_csv_cells(r));
    return os.str();
}

std::string moments_csv(const MomentScaling& m) {
    std::ostringstream os;
    CsvWriter csv(os, {"p", "eps", "estimate", "std_error", "ci_low", "ci_high", "replicas", "normalized",
                       "dropped", "seed", "config_hash"});
    for (const auto& r : m.rows)
        csv.row({std::to_string(r.p), format_real(r.eps), format_real(r.report.estimate),
                 format_real(r.report.std_error), format_real(r.report.ci95.first),
                 format_real(r.report.ci95.second), std::to_string(r.report.replicas),
                 format_real(r.normalized), b2s(r.dropped), std::to_string(r.report.seed),
                 r.report.config_hash});
    return os.str();
}

std::string fits_csv(const std::vector<std::pair<std::string, FitReport>>& fits) {
    std::ostringstream os;
    CsvWriter csv(os, {"fit", "slope", "intercept", "slope_stderr", "r_squared", "points"});
    for (const auto& [name, f] : fits)
        csv.row({name, format_real(f.slope), format_real(f.intercept), format_real(f.slope_stderr),
                 format_real(f.r_squared), std::to_string(f.points.size())});
    return os.str();
}

std::string moment_fits_csv(const MomentScaling& m) {
    std::ostringstream os;
    CsvWriter csv(os, {"p", "slope", "intercept", "slope_stderr", "r_squared", "sup_normalized",
                       "sup_normalized_half"});
    for (std::size_t k = 0; k < m.p_list.size(); ++k)
        csv.row({std::to_string(m.p_list[k]), format_real(m.fits[k].slope), format_real(m.fits[k].intercept),
                 format_real(m.fits[k].slope_stderr), format_real(m.fits[k].r_squared),
                 format_real(m.sup_normalized[k]), format_real(m.sup_normalized_half[k])});
    return os.str();
}

std::string ks_csv(const std::vector<KsRow>& rows) {
    std::ostringstream os;
    CsvWriter csv(os, {"functional", "statistic", "p_value", "n1", "n2", "exact", "mean_a", "mean_b"});
    for (const auto& r : rows)
        csv.row({r.functional, format_real(r.ks.statistic), format_real(r.ks.p_value), std::to_string(r.ks.n1),
                 std::to_string(r.ks.n2), b2s(r.ks.exact), format_real(r.mean_a), format_real(r.mean_b)});
    return os.str();
}

std::string holder_csv(const HolderTable& t) {
    std::ostringstream os;
    CsvWriter csv(os, {"n", "median_stat", "median_control", "median_ratio", "control_median_ratio"});
    for (std::size_t k = 0; k < t.n_ladder.size(); ++k) {
        std::vector<double> s, c;
        for (std::size_t r = 0; r < t.stat.size(); ++r) {
            s.push_back(t.stat[r][k]);
            c.push_back(t.control[r][k]);
        }
        csv.row({std::to_string(t.n_ladder[k]), format_real(median(s)), format_real(median(c)),
                 k ? format_real(t.median_ratio[k - 1]) : "", k ? format_real(t.control_median_ratio[k - 1]) : ""});
    }
    return os.str();
}

std::string dimension_csv(const std::vector<double>& eps, const DimensionResult& d) {
    std::ostringstream os;
    CsvWriter csv(os, {"eps", "v_estimate", "v_std_error", "band_estimate", "band_std_error", "replicas"});
    for (std::size_t e = 0; e < eps.size(); ++e)
        csv.row({format_real(eps[e]), format_real(d.points[e].estimate), format_real(d.points[e].std_error),
                 format_real(d.control[e].estimate), format_real(d.control[e].std_error),
                 std::to_string(d.points[e].replicas)});
    return os.str();
}

std::string bessel_csv(const std::vector<BesselAcRow>& rows) {
    std::ostringstream os;
    CsvWriter csv(os, {"set", "lo", "hi", "left", "left_se", "left_coarse", "left_coarse_se", "right",
                       "right_se", "agree", "sensitivity_flag"});
    for (const auto& r : rows)
        csv.row({r.set.name, format_real(r.set.lo), format_real(r.set.hi), format_real(r.left.estimate),
                 format_real(r.left.std_error), format_real(r.left_coarse.estimate),
                 format_real(r.left_coarse.std_error), format_real(r.right.estimate),
                 format_real(r.right.std_error), b2s(r.agree), b2s(r.sensitivity_flag)});
    return os.str();
}

std::string spine_csv(const SpineClgResult& s) {
    std::ostringstream os;
    auto header = estimate_csv_header();
    header.insert(header.end(), {"target", "mean_L", "acceptance", "mean_atoms", "covers", "moves_toward"});
    CsvWriter csv(os, header);
    for (const auto* r : {&s.at_cut, &s.at_quarter}) {
        auto cells = estimate_csv_cells(*r);
        cells.insert(cells.end(), {format_real(s.target), format_real(s.mean_L), format_real(s.acceptance),
                                   format_real(s.mean_atoms), b2s(s.covers), b2s(s.moves_toward)});
        csv.row(cells);
    }
    return os.str();
}

std::string metric_csv(const MetricValidation& v) {
    std::ostringstream os;
    CsvWriter csv(os, {"trajectory", "m", "i", "j", "lower", "estimate", "upper"});
    for (std::size_t t = 0; t < v.rows.size(); ++t)
        for (const auto& r : v.rows[t])
            csv.row({std::to_string(t), std::to_string(r.m), std::to_string(r.i), std::to_string(r.j),
                     format_real(r.lower), format_real(r.estimate), format_real(r.upper)});
    return os.str();
}

std::string metric_summary_csv(const MetricValidation& v) {
    std::ostringstream os;
    CsvWriter csv(os, {"trajectories", "star_pairs", "median_star_gap", "max_ladder_increase", "bracket_ok"});
    csv.row({std::to_string(v.rows.size()), std::to_string(v.star_gaps.size()), format_real(v.median_star_gap),
             format_real(v.max_ladder_increase), b2s(v.bracket_ok)});
    return os.str();
}

std::string lil_csv(const LilSummary& s) {
    std::ostringstream os;
    CsvWriter csv(os, {"k_lo", "k_max", "q50", "q90", "q99", "max"});
    for (const auto& r : s.rows)
        csv.row({std::to_string(s.k_lo), std::to_string(r.k_max), format_real(r.q50), format_real(r.q90),
                 format_real(r.q99), format_real(r.max)});
    return os.str();
}

std::string tail_csv(const TailTable& t) {
    std::ostringstream os;
    CsvWriter csv(os, {"u", "probability", "ci_low", "ci_high", "exceed", "flagged"});
    for (const auto& r : t.rows)
        csv.row({format_real(r.u), format_real(r.probability), format_real(r.ci_low), format_real(r.ci_high),
                 std::to_string(r.exceed), b2s(r.flagged)});
    return os.str();
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

// Commands ------------------------------------------------------------------------

ExperimentContext context(const RunConfig& c, std::string_view label) {
    return {derive_seed(c.root_seed, label), c.workers, config_hash(c)};
}

Artifacts cmd_sample(const RunConfig& c) {
    const std::size_t n = or_default<std::size_t>(c.grid_n, 4096);
    const std::size_t count = or_default<std::size_t>(c.replicas, 1);
    const ExperimentContext ctx = context(c, "sample");
    Artifacts a;
    std::ostringstream os;
    CsvWriter csv(os, {"index", "file", "n_steps", "duration", "w_star", "argmin", "seed"});
    for (std::size_t i = 0; i < count; ++i) {
        RandomStream rng(ctx.root_seed, i);
        const SnakeTrajectory w = sample_normalized_snake(rng, n);
        char name[40];
        std::snprintf(name, sizeof name, "trajectory_%05zu.bsnk", i);
        const auto bytes = encode_trajectory(w);
        a[name] = std::string(bytes.begin(), bytes.end());
        const ArgMin m = w_star(w);
        csv.row({std::to_string(i), name, std::to_string(n), format_real(w.duration), format_real(m.value),
                 std::to_string(m.index), std::to_string(ctx.root_seed)});
    }
    a["sample.csv"] = os.str();
    return a;
}

Artifacts cmd_estimate(const RunConfig& c) {
    const ExperimentContext ctx = context(c, "estimate");
    WindowOptions w;
    w.a = c.window_a;
    w.b = c.window_b;
    w.strata = c.strata;
    w.coarse_n = or_default<std::size_t>(c.grid_n, 64);
    NFunctional f;
    if (c.functional == "one")
        f = functional_one();
    else if (c.functional == "min-below")
        f = functional_min_below(c.level);
    else if (c.functional == "occupation")
        f = functional_positive_occupation(c.eps_list.empty() ? 0.5 : c.eps_list.front());
    else
        throw ParameterError("unknown functional '" + c.functional + "' (one, min-below, occupation)");
    const auto reports = estimate_N_functional(ctx, c.x, f, w, or_default<std::size_t>(c.replicas, 10000));
    return {{"estimate.csv", estimates_csv(reports)}};
}

Artifacts cmd_moments(const RunConfig& c) {
    MomentOptions opt;
    opt.coarse_n = or_default<std::size_t>(c.grid_n, 256);
    const auto eps = c.eps_list.empty() ? default_eps_list() : c.eps_list;
    const auto p = c.p_list.empty() ? std::vector<int>{1, 2} : c.p_list;
    const auto m = moment_scaling(context(c, "moments"), p, eps, or_default<std::size_t>(c.replicas, 4000), opt);
    return {{"moments.csv", moments_csv(m)}, {"moments_fit.csv", moment_fits_csv(m)}};
}

Artifacts cmd_dimension(const RunConfig& c) {
    const auto eps = c.eps_list.empty() ? default_eps_list() : c.eps_list;
    const auto d = dimension_estimate(context(c, "dimension"), eps, or_default<std::size_t>(c.replicas, 10000),
                                      or_default<std::size_t>(c.grid_n, 1u << 14));
    return {{"dimension.csv", dimension_csv(eps, d)},
            {"dimension_fit.csv",
             fits_csv({{"v_eps", d.fit}, {"v_eps_half", d.fit_half}, {"label_band", d.control_fit}})}};
}

Artifacts cmd_reroot(const RunConfig& c) {
    const auto rows = reroot_invariance_test(context(c, "reroot-test"), c.s_fixed,
                                             or_default<std::size_t>(c.replicas, 10000),
                                             or_default<std::size_t>(c.grid_n, 1u << 14));
    return {{"reroot_test.csv", ks_csv(rows)}};
}

Artifacts cmd_scaling(const RunConfig& c) {
    const auto s = scaling_pushforward_test(context(c, "scaling-test"), c.lambda,
                                            or_default<std::size_t>(c.replicas, 10000),
                                            or_default<std::size_t>(c.grid_n, 1u << 14),
                                            c.eps_list.empty() ? 0.25 : c.eps_list.front());
    std::string body = ks_csv(s.rows);
    body += "sigma_exact," + b2s(s.sigma_exact) + ",,,,,,\n";
    return {{"scaling_test.csv", body}};
}

Artifacts cmd_holder(const RunConfig& c) {
    const auto ladder = c.n_ladder.empty() ? std::vector<std::size_t>{1024, 4096, 16384, 65536} : c.n_ladder;
    const auto t = holder_statistic(context(c, "holder"), ladder, or_default<std::size_t>(c.replicas, 200));
    return {{"holder.csv", holder_csv(t)}};
}

Artifacts cmd_spine(const RunConfig& c) {
    SpineOptions opt;
    opt.grid_dt = c.dt;
    opt.sigma_cut = c.sigma_cut;
    opt.atom_grid_n = or_default<std::size_t>(c.grid_n, 16);
    const auto s = spine_clg_experiment(context(c, "spine-clg"), c.x, or_default<std::size_t>(c.replicas, 40000), opt);
    return {{"spine_clg.csv", spine_csv(s)}};
}

Artifacts cmd_bessel(const RunConfig& c) {
    BesselAcOptions opt;
    opt.dt = c.dt;
    const std::vector<TestSet> sets{{"end_in_1_2", 1.0, 2.0},
                                    {"end_positive", 0.0, std::numeric_limits<double>::infinity()}};
    const auto rows = bessel_ac_test(context(c, "bessel-ac"), c.x, c.t, sets,
                                     or_default<std::size_t>(c.replicas, 100000), opt);
    return {{"bessel_ac.csv", bessel_csv(rows)}};
}

Artifacts cmd_metric(const RunConfig& c) {
    const std::size_t n = or_default<std::size_t>(c.grid_n, 1u << 14);
    std::vector<std::size_t> ladder = c.m_ladder;
    if (ladder.empty()) ladder = {c.anchors / 8, c.anchors / 4, c.anchors / 2, c.anchors};
    const double factor = c.ident_tol > 0.0 ? c.ident_tol * std::sqrt(static_cast<double>(n)) : 2.0;
    std::vector<SnakeTrajectory> given;
    for (const auto& path : c.input) given.push_back(read_trajectory(path));
    const auto v = metric_validation(context(c, "metric-validate"), or_default<std::size_t>(c.replicas, 50), n,
                                     ladder, 64, 8, factor, given);
    return {{"metric_validate.csv", metric_csv(v)}, {"metric_summary.csv", metric_summary_csv(v)}};
}

} // namespace

// Suite ---------------------------------------------------------------------------------

SuiteProfile suite_profile(std::string_view name) {
    SuiteProfile p;
    if (name == "desk") {
        p = {"desk",
             200000, 20, 64, 1e-3, 500.0,
             1000000, 10, 64, 1e-4, 100.0, 256.0,
             40000, 16, 1e-3, 1e-4,
             100000, 1e-3,
             50, 1u << 14, 64, 8, {128, 256, 512, 1024},
             4000, 256,
             10000, 1u << 14,
             10000, 1u << 14,
             10000, 1u << 14,
             200, {1u << 10, 1u << 12, 1u << 14, 1u << 16},
             500, 20000,
             true};
    } else if (name == "quick") {
        p = {"quick",
             2000, 10, 32, 1e-3, 500.0,
             2000, 10, 32, 1e-4, 100.0, 64.0,
             200, 16, 1e-3, 1e-4,
             2000, 1e-2,
             3, 1u << 10, 16, 4, {32, 64},
             100, 64,
             100, 1u << 10,
             200, 1u << 10,
             200, 1u << 10,
             20, {1u << 8, 1u << 10},
             20, 400,
             false};
    } else {
        throw ParameterError("unknown suite profile '" + std::string(name) + "' (desk, quick)");
    }
    return p;
}

std::string format_criterion(const CriterionResult& c) {
    std::string tag = c.passed ? "[PASS]" : (c.gating ? "[FAIL]" : "[INFO]");
    if (!c.gating && c.passed) tag = "[PASS]";
    return tag + " " + c.id + " " + c.name + ": " + c.measured + " | requires " + c.requirement +
           (c.gating ? "" : " (informational)");
}

std::string suite_csv(const std::vector<CriterionResult>& criteria) {
    std::ostringstream os;
    CsvWriter csv(os, {"id", "name", "gating", "passed", "measured", "requirement"});
    auto quote = [](std::string s) {
        std::string out = "\"";
        for (char ch : s) out += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
        return out + "\"";
    };
    for (const auto& c : criteria)
        csv.row({c.id, quote(c.name), b2s(c.gating), b2s(c.passed), quote(c.measured), quote(c.requirement)});
    return os.str();
}

SuiteOutcome run_suite(const SuiteProfile& p, std::uint64_t root_seed, unsigned workers, std::ostream& progress) {
    SuiteOutcome out;
    RunConfig run_config;
    run_config.command = "suite";
    run_config.profile = p.name;
    run_config.root_seed = root_seed;
    const std::string hash = config_hash(run_config);
    auto ctx = [&](std::string_view label) { return ExperimentContext{derive_seed(root_seed, label), workers, hash}; };
    auto add = [&](CriterionResult c) {
        progress << format_criterion(c) << std::endl;
        out.criteria.push_back(std::move(c));
    };

    {  // 1
        WindowOptions w{p.c1_window_a, p.c1_window_b, p.c1_strata, p.c1_coarse, {}};
        auto r = estimate_N_functional(ctx("c1"), 1.0, functional_min_below(0.0), w, p.c1_replicas);
        out.artifacts["c1_min_tail.csv"] = estimates_csv(r);
        const double target = min_tail(1.0, 0.0);
        const double est = r[0].estimate + r[0].window_tail_mass;
        const double rel = std::abs(est - target) / target;
        add({"C1", "minimum tail N_1(W* <= 0)", true, rel < 0.10,
             "estimate " + fmt(r[0].estimate) + " +- " + fmt(r[0].std_error, 3) + " + window tail " +
                 fmt(r[0].window_tail_mass, 4) + " = " + fmt(est) + " (rel. error " + fmt(rel, 3) + ")",
             "|est - 1.5|/1.5 < 0.10"});
    }
    {  // 2, 3
        WindowOptions w{p.c23_window_a, p.c23_window_b, p.c23_strata, p.c23_coarse, {}};
        auto r = estimate_N_functional(ctx("c2"), 1.0, functional_positive_occupation(0.5, p.c23_cells_per_unit),
                                       w, p.c23_replicas);
        out.artifacts["c2_c3_moments.csv"] = estimates_csv(r);
        const double m1 = first_moment(1.0, 0.5);
        const double m2 = second_moment(1.0, 0.5);
        const double rel1 = std::abs(r[0].estimate - m1) / m1;
        const double rel2 = std::abs(r[1].estimate - m2) / m2;
        add({"C2", "first moment N_1(int 1{W<=0.5}; W*>0)", true, rel1 < 0.10,
             "estimate " + fmt(r[0].estimate) + " +- " + fmt(r[0].std_error, 3) + " vs " + fmt(m1) +
                 " (rel. error " + fmt(rel1, 3) + ")",
             "relative error < 0.10"});
        add({"C3", "second moment N_1((int 1{W<=0.5})^2; W*>0)", true, rel2 < 0.15,
             "estimate " + fmt(r[1].estimate) + " +- " + fmt(r[1].std_error, 3) + " vs " + fmt(m2) +
                 " (rel. error " + fmt(rel2, 3) + ")",
             "relative error < 0.15"});
    }
    {  // 4
        SpineOptions opt;
        opt.grid_dt = p.c4_dt;
        opt.sigma_cut = p.c4_sigma_cut;
        opt.atom_grid_n = p.c4_atom_n;
        const auto s = spine_clg_experiment(ctx("c4"), 1.0, p.c4_replicas, opt);
        out.artifacts["c4_spine_clg.csv"] = spine_csv(s);
        const double bias = s.at_cut.truncation->dropped_functional_bias_bound;
        add({"C4", "spine Laplace transform E[1 - exp(-sigma/2)]", true, s.covers && s.moves_toward,
             "est(cut) " + fmt(s.at_cut.estimate) + " +- " + fmt(s.at_cut.std_error, 3) + ", bias bound " +
                 fmt(bias, 3) + ", est(cut/4) " + fmt(s.at_quarter.estimate) + ", target " + fmt(s.target) +
                 ", E[L] " + fmt(s.mean_L, 4),
             "target in [ci_low, ci_high + bias bound] and est(cut/4) closer to target"});
    }
    {  // 5
        BesselAcOptions opt;
        opt.dt = p.c5_dt;
        const std::vector<TestSet> sets{{"end_in_1_2", 1.0, 2.0},
                                        {"end_positive", 0.0, std::numeric_limits<double>::infinity()}};
        const auto rows = bessel_ac_test(ctx("c5"), 1.0, 1.0, sets, p.c5_replicas, opt);
        out.artifacts["c5_bessel_ac.csv"] = bessel_csv(rows);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto& r = rows[k];
            add({k == 0 ? "C5" : "C5b", "Bessel absolute continuity, F = 1{end in " + r.set.name + "}", k == 0,
                 r.agree && !r.sensitivity_flag,
                 "left " + fmt(r.left.estimate) + " +- " + fmt(r.left.std_error, 3) + ", right " +
                     fmt(r.right.estimate) + " +- " + fmt(r.right.std_error, 3) + ", dt-halving shift " +
                     fmt(r.left.estimate - r.left_coarse.estimate, 3),
                 "agreement within combined 95% CI and no dt-sensitivity flag"});
        }
    }
    {  // 6
        const auto v = metric_validation(ctx("c6"), p.c6_trajectories, p.c6_n, p.c6_ladder, p.c6_star_targets,
                                         p.c6_random_pairs);
        out.artifacts["c6_metric.csv"] = metric_csv(v);
        out.artifacts["c6_metric_summary.csv"] = metric_summary_csv(v);
        add({"C6", "metric identity D(s*, t) = W_t - W*", true,
             v.median_star_gap < 0.05 && v.max_ladder_increase <= 1e-9 && v.bracket_ok,
             "median relative gap " + fmt(v.median_star_gap, 3) + ", max increase along ladder " +
                 fmt(v.max_ladder_increase, 3) + ", bracket " + (v.bracket_ok ? "ok" : "violated"),
             "median gap < 0.05, increase <= 1e-9"});
    }
    {  // 7
        MomentOptions opt;
        opt.coarse_n = p.c7_coarse;
        const auto m = moment_scaling(ctx("c7"), {1, 2}, default_eps_list(), p.c7_replicas, opt);
        out.artifacts["c7_moments.csv"] = moments_csv(m);
        out.artifacts["c7_moments_fit.csv"] = moment_fits_csv(m);
        const double s1 = m.fits[0].slope, s2 = m.fits[1].slope;
        bool stable = true;
        for (std::size_t k = 0; k < 2; ++k) {
            const double ratio = m.sup_normalized[k] / m.sup_normalized_half[k];
            stable = stable && std::isfinite(m.sup_normalized[k]) && ratio > 0.8 && ratio < 1.25;
        }
        add({"C7", "moment scaling E[V_eps^p] ~ eps^(4p)", true,
             s1 >= 3.7 && s1 <= 4.3 && s2 >= 7.4 && s2 <= 8.6 && stable,
             "slope p=1 " + fmt(s1, 4) + ", p=2 " + fmt(s2, 4) + ", sup E/(p! eps^4p) " + fmt(m.sup_normalized[0], 4) +
                 " / " + fmt(m.sup_normalized[1], 4) + " (half replicas " + fmt(m.sup_normalized_half[0], 4) +
                 " / " + fmt(m.sup_normalized_half[1], 4) + ")",
             "p=1 in [3.7, 4.3], p=2 in [7.4, 8.6], sup ratio full/half in (0.8, 1.25)"});
    }
    {  // 8
        const auto d = dimension_estimate(ctx("c8"), default_eps_list(), p.c8_replicas, p.c8_n);
        out.artifacts["c8_dimension.csv"] = dimension_csv(default_eps_list(), d);
        out.artifacts["c8_dimension_fit.csv"] =
            fits_csv({{"v_eps", d.fit}, {"v_eps_half", d.fit_half}, {"label_band", d.control_fit}});
        add({"C8", "dimension estimate", true, std::abs(d.fit.slope - 4.0) <= 0.5,
             "slope " + fmt(d.fit.slope, 4) + " +- " + fmt(d.fit.slope_stderr, 2) + " (label-band control " +
                 fmt(d.control_fit.slope, 3) + ")",
             "|slope - 4| <= 0.5"});
    }
    {  // 9
        const auto rows = reroot_invariance_test(ctx("c9"), 0.3, p.c9_replicas, p.c9_n);
        out.artifacts["c9_reroot.csv"] = ks_csv(rows);
        bool ok = true;
        std::string measured;
        for (const auto& r : rows) {
            if (r.functional == "duration") continue;
            ok = ok && r.ks.p_value > 0.01;
            measured += r.functional + " p=" + fmt(r.ks.p_value, 3) + " ";
        }
        add({"C9", "re-rooting invariance at s = 0.3", true, ok, measured, "KS p > 0.01 for each functional"});
    }
    {  // 10
        const auto s = scaling_pushforward_test(ctx("c10"), 2.0, p.c10_replicas, p.c10_n);
        std::string body = ks_csv(s.rows);
        body += "sigma_exact," + b2s(s.sigma_exact) + ",,,,,,\n";
        out.artifacts["c10_scaling.csv"] = body;
        bool ok = s.sigma_exact;
        std::string measured = std::string("sigma exact ") + (s.sigma_exact ? "yes" : "no") + ", ";
        for (const auto& r : s.rows) {
            ok = ok && r.ks.p_value > 0.01;
            measured += r.functional + " p=" + fmt(r.ks.p_value, 3) + " ";
        }
        add({"C10", "scaling pushforward at lambda = 2", true, ok, measured,
             "KS p > 0.01 for each functional and sigma = lambda^2 exactly"});
    }
    {  // 11
        const auto t = holder_statistic(ctx("c11"), p.c11_ladder, p.c11_replicas);
        out.artifacts["c11_holder.csv"] = holder_csv(t);
        bool bounded = true, blows = true;
        std::string r1, r2;
        for (std::size_t k = 0; k < t.median_ratio.size(); ++k) {
            bounded = bounded && t.median_ratio[k] <= 1.5;
            blows = blows && t.control_median_ratio[k] >= 2.0;
            r1 += fmt(t.median_ratio[k], 4) + " ";
            r2 += fmt(t.control_median_ratio[k], 4) + " ";
        }
        add({"C11a", "Hoelder modulus, exponent 1/4", true, bounded, "median ratios per step " + r1,
             "every ratio <= 1.5"});
        add({"C11b", "Hoelder negative control, exponent 1/3", true, blows, "median ratios per step " + r2,
             "every ratio >= 2"});
    }
    {  // 12
        const auto lil = lil_statistic(ctx("c12-lil"), 3, 12, p.c12_lil_replicas);
        out.artifacts["c12_lil.csv"] = lil_csv(lil);
        const double first = lil.rows.front().q99, last = lil.rows.back().q99;
        const double span = static_cast<double>(lil.rows.back().k_max - lil.rows.front().k_max);
        const bool sublinear = last <= first * (1.0 + span);
        add({"C12a", "LIL statistic boundedness trend", false, sublinear,
             "q99 over k in [3,3] " + fmt(first, 4) + ", over [3,12] " + fmt(last, 4),
             "q99 grows sublinearly in the largest k"});
        TailOptions topt;
        topt.replicas = p.c12_tail_replicas;
        topt.workers = workers;
        const std::vector<double> u_grid{0.0, 0.002, 0.005, 0.01, 0.02, 0.03, 0.05, 0.08, 0.12, 0.2};
        const auto tail = conditional_tail_experiment(derive_seed(root_seed, "c12-tail"), 2.5, 1.0, u_grid, topt);
        out.artifacts["c12_tail.csv"] = tail_csv(tail);
        add({"C12b", "conditional occupation tail, log-linear fit", false, tail.fit.r_squared >= 0.9,
             "slope " + fmt(tail.fit.slope, 4) + ", R^2 " + fmt(tail.fit.r_squared, 4) + ", mass " +
                 fmt(tail.mass_estimate, 4) + " vs exact " + fmt(tail.mass_exact, 4),
             "R^2 >= 0.9"});
    }
    if (p.determinism_check) {  // 13
        const SuiteProfile quick = suite_profile("quick");
        std::ostringstream sink;
        const auto one = run_suite(quick, root_seed, 1, sink);
        const auto many = run_suite(quick, root_seed, std::max(4u, workers), sink);
        bool same = one.artifacts.size() == many.artifacts.size();
        std::size_t bytes = 0;
        for (const auto& [name, body] : one.artifacts) {
            const auto it = many.artifacts.find(name);
            same = same && it != many.artifacts.end() && it->second == body;
            bytes += body.size();
        }
        add({"C13", "determinism across worker counts", true, same,
             std::to_string(one.artifacts.size()) + " CSVs, " + std::to_string(bytes) + " bytes, workers 1 vs " +
                 std::to_string(std::max(4u, workers)) + (same ? ": identical" : ": differ"),
             "byte-identical CSVs"});
    }
    out.artifacts["suite.csv"] = suite_csv(out.criteria);
    return out;
}

// Dispatch --------------------------------------------------------------------------------

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"sample", "estimate", "moments", "dimension",
                                                "reroot-test", "scaling-test", "holder", "spine-clg",
                                                "bessel-ac", "metric-validate", "suite"};
    return names;
}

std::string resolve_output_dir(const RunConfig& c) {
    if (!c.output_dir.empty()) return c.output_dir;
    if (const char* env = std::getenv("BSPHERE_OUTPUT_DIR"); env && *env) return env;
    return "bsphere-out";
}

Artifacts compute(const RunConfig& c, std::ostream& progress, bool& acceptance_failed) {
    acceptance_failed = false;
    if (c.command == "sample") return cmd_sample(c);
    if (c.command == "estimate") return cmd_estimate(c);
    if (c.command == "moments") return cmd_moments(c);
    if (c.command == "dimension") return cmd_dimension(c);
    if (c.command == "reroot-test") return cmd_reroot(c);
    if (c.command == "scaling-test") return cmd_scaling(c);
    if (c.command == "holder") return cmd_holder(c);
    if (c.command == "spine-clg") return cmd_spine(c);
    if (c.command == "bessel-ac") return cmd_bessel(c);
    if (c.command == "metric-validate") return cmd_metric(c);
    if (c.command == "suite") {
        auto outcome = run_suite(suite_profile(c.profile), c.root_seed, c.workers, progress);
        for (const auto& cr : outcome.criteria)
            if (cr.gating && !cr.passed) acceptance_failed = true;
        return std::move(outcome.artifacts);
    }
    throw std::invalid_argument("unknown command '" + c.command + "'");
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    using nlohmann::json;
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), c.command) == names.end()) {
        err << "error: unknown command '" << c.command << "'\n";
        return kExitUnknownCommand;
    }
    const std::filesystem::path dir = resolve_output_dir(c);
    json record{{"command", c.command},      {"config_hash", config_hash(c)}, {"root_seed", c.root_seed},
                {"version", kVersion},       {"workers", c.workers},          {"output_dir", dir.string()}};
    json cfg = json::object();
    {
        std::istringstream is(canonical_text(c));
        std::string line;
        while (std::getline(is, line)) {
            const auto eq = line.find('=');
            cfg[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }
    record["config"] = cfg;

    int code = kExitOk;
    Artifacts artifacts;
    bool acceptance_failed = false;
    const auto start = std::chrono::steady_clock::now();
    try {
        artifacts = compute(c, out, acceptance_failed);
        if (acceptance_failed) code = kExitAcceptanceFailure;
    } catch (const ParameterError& e) {
        err << "config error: " << e.what() << "\n";
        record["failure"] = {{"kind", "config"}, {"message", e.what()}};
        code = kExitConfigError;
    } catch (const ContractError& e) {
        err << "config error: " << e.what() << "\n";
        record["failure"] = {{"kind", "contract"}, {"message", e.what()}};
        code = kExitConfigError;
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << "\n";
        record["failure"] = {{"kind", "resource"}, {"message", e.what()}};
        code = kExitResourceError;
    } catch (const QuadratureError& e) {
        err << "resource error: " << e.what() << "\n";
        record["failure"] = {{"kind", "quadrature"}, {"message", e.what()},
                             {"achieved_tolerance", e.achieved_tolerance}};
        code = kExitResourceError;
    } catch (const CorruptFileError& e) {
        err << "corrupt file: " << e.what() << "\n";
        record["failure"] = {{"kind", "corrupt_file"}, {"message", e.what()}};
        code = kExitCorruptFile;
    } catch (const UnsupportedVersionError& e) {
        err << "corrupt file: " << e.what() << "\n";
        record["failure"] = {{"kind", "unsupported_version"}, {"message", e.what()}};
        code = kExitCorruptFile;
    }
    record["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record["exit_code"] = code;

    try {
        json files = json::array();
        for (const auto& [name, body] : artifacts) {
            write_file_atomic(dir / name, body);
            files.push_back(name);
        }
        record["outputs"] = files;
        if (acceptance_failed) {
            json failed = json::array();
            std::istringstream is(artifacts.count("suite.csv") ? artifacts.at("suite.csv") : "");
            std::string line;
            std::getline(is, line);
            while (std::getline(is, line))
                if (line.find(",1,0,") != std::string::npos) failed.push_back(line.substr(0, line.find(',')));
            record["failure"] = {{"kind", "acceptance"}, {"criteria", failed}};
        }
        std::filesystem::create_directories(dir);
        std::ofstream log(dir / "runs.jsonl", std::ios::app);
        if (!log) throw OutputError("cannot append to " + (dir / "runs.jsonl").string());
        log << record.dump() << "\n";
        if (!log) throw OutputError("write failed for " + (dir / "runs.jsonl").string());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "output error: " << e.what() << "\n";
        return kExitOutputError;
    } catch (const OutputError& e) {
        err << "output error: " << e.what() << "\n";
        return kExitOutputError;
    }
    if (code == kExitOk || code == kExitAcceptanceFailure)
        out << "wrote " << artifacts.size() << " file(s) to " << dir.string() << "\n";
    return code;
}

} // namespace bsphere
