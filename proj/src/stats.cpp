#include "bsphere/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "bsphere/errors.hpp"

namespace bsphere {

EstimateReport make_report(std::string name, double estimate, double std_error,
                           std::uint64_t replicas, std::uint64_t seed) {
    EstimateReport r;
    r.name = std::move(name);
    r.estimate = estimate;
    r.std_error = std_error;
    r.ci95 = {estimate - 1.96 * std_error, estimate + 1.96 * std_error};
    r.replicas = replicas;
    r.seed = seed;
    return r;
}

EstimateReport summarize(std::string name, std::span<const double> values, std::uint64_t seed) {
    const auto n = values.size();
    if (n == 0) throw ParameterError("summarize: no replica values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return make_report(std::move(name), mean, se, n, seed);
}

FitReport linear_fit(std::vector<std::pair<double, double>> points) {
    const auto n = points.size();
    if (n < 2) throw ParameterError("linear_fit: need at least two points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) throw ParameterError("linear_fit: abscissae are all equal");
    FitReport f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (const auto& [x, y] : points) {
        const double e = y - f.intercept - f.slope * x;
        sse += e * e;
    }
    f.slope_stderr = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    f.points = std::move(points);
    return f;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue_exact(std::size_t n, std::size_t m, double d) {
    if (n == 0 || m == 0) throw ParameterError("ks_pvalue_exact: empty sample");
    if (d <= 0.0) return 1.0;
    const double tol = 1e-12;
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    auto inside = [&](std::size_t i, std::size_t j) {
        return std::abs(static_cast<double>(i) / dn - static_cast<double>(j) / dm) < d - tol;
    };
    // probability mass of uniformly random lattice paths that stayed inside
    std::vector<double> row(m + 1, 0.0);
    row[0] = 1.0;
    for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t j = 0; j <= m; ++j) {
            if (i == 0 && j == 0) continue;
            double p = 0.0;
            if (i > 0) {
                // row still holds the (i-1, j) mass
                const double rem_i = static_cast<double>(n - i + 1);
                const double rem = rem_i + static_cast<double>(m - j);
                p += row[j] * rem_i / rem;
            }
            if (j > 0) {
                const double rem_j = static_cast<double>(m - j + 1);
                const double rem = static_cast<double>(n - i) + rem_j;
                p += row[j - 1] * rem_j / rem;
            }
            row[j] = inside(i, j) ? p : 0.0;
        }
        if (i == 0) row[0] = 1.0;
    }
    return std::clamp(1.0 - row[m], 0.0, 1.0);
}

KsReport ks_two_sample(std::vector<double> a, std::vector<double> b, std::size_t exact_limit) {
    if (a.empty() || b.empty()) throw ParameterError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    KsReport r;
    r.n1 = a.size();
    r.n2 = b.size();
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    r.statistic = d;
    if (r.n1 * r.n2 <= exact_limit) {
        r.exact = true;
        r.p_value = ks_pvalue_exact(r.n1, r.n2, d);
    } else {
        const double en = std::sqrt(na * nb / (na + nb));
        r.p_value = kolmogorov_survival((en + 0.12 + 0.11 / en) * d);
    }
    return r;
}

ChiSquareReport chi_square_gof(std::span<const double> observed, std::span<const double> expected,
                               double min_expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw ParameterError("chi_square_gof: size mismatch");
    std::vector<double> o(observed.begin(), observed.end());
    std::vector<double> e(expected.begin(), expected.end());
    while (e.size() > 1 && e.back() < min_expected) {
        e[e.size() - 2] += e.back();
        o[o.size() - 2] += o.back();
        e.pop_back();
        o.pop_back();
    }
    ChiSquareReport r;
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (!(e[k] > 0.0)) throw ParameterError("chi_square_gof: nonpositive expected count");
        r.statistic += (o[k] - e[k]) * (o[k] - e[k]) / e[k];
    }
    r.dof = static_cast<double>(e.size()) - 1.0;
    if (r.dof < 1.0) return r;
    const boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ParameterError("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

} // namespace bsphere
