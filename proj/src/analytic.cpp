#include "bsphere/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsphere/errors.hpp"

namespace bsphere {

namespace {

template <unsigned N>
double gk(const std::function<double(double)>& f, double a, double b, unsigned depth, double tol,
          double* err) {
    return boost::math::quadrature::gauss_kronrod<double, N>::integrate(f, a, b, depth, tol, err);
}

} // namespace

double Quadrature::integrate(const std::function<double(double)>& f, double a, double b) const {
    if (!(b > a)) return 0.0;
    double err = 0.0, l1 = 0.0;
    double v;
    switch (points) {
    case 15: v = gk<15>(f, a, b, max_depth, rel_tol, &err); break;
    case 21: v = gk<21>(f, a, b, max_depth, rel_tol, &err); break;
    case 31: v = gk<31>(f, a, b, max_depth, rel_tol, &err); break;
    case 41: v = gk<41>(f, a, b, max_depth, rel_tol, &err); break;
    case 51: v = gk<51>(f, a, b, max_depth, rel_tol, &err); break;
    default: throw ParameterError("Quadrature: unsupported Kronrod order");
    }
    (void)l1;
    if (!std::isfinite(v)) throw QuadratureError("quadrature: non-finite integral (divergent integrand?)", err);
    const double floor = 1e-300;
    if (err > 10.0 * rel_tol * std::abs(v) + floor) {
        std::ostringstream msg;
        msg << "quadrature: error estimate " << err << " above tolerance for value " << v;
        throw QuadratureError(msg.str(), err / std::max(std::abs(v), floor));
    }
    return v;
}

double Quadrature::integrate(const std::function<double(double)>& f, double a, double b,
                             std::vector<double> breaks) const {
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double c) { return !(c > a && c < b); }),
                 breaks.end());
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    double total = 0.0;
    double lo = a;
    for (double c : breaks) {
        total += integrate(f, lo, c);
        lo = c;
    }
    return total + integrate(f, lo, b);
}

double min_tail(double x, double y) {
    if (!(y < x)) throw ParameterError("min_tail: need y < x");
    const double d = x - y;
    return 1.5 / (d * d);
}

double ito_tail(double s) {
    if (!(s > 0.0)) throw ParameterError("ito_tail: s must be positive");
    if (std::isinf(s)) return 0.0;
    return 1.0 / std::sqrt(2.0 * std::numbers::pi * s);
}

double green_ball_kernel(double y, double eps) {
    if (y >= eps) return (2.0 / 35.0) * std::pow(eps, 5) * std::pow(y, -7);
    const double y2 = 1.0 / (y * y);
    return (2.0 / 7.0) * (y2 / 5.0 + 0.5 * (y2 - 1.0 / (eps * eps)));
}

double first_moment(double x, double eps) {
    if (!(x > 0.0) || !(eps > 0.0)) throw ParameterError("first_moment: x and eps must be positive");
    return std::pow(x, 4) * green_ball_kernel(x, eps);
}

double second_moment(double x, double eps, const Quadrature& quad) {
    if (!(x > 0.0) || !(eps > 0.0)) throw ParameterError("second_moment: x and eps must be positive");
    auto f = [&](double r) {
        const double g = green_ball_kernel(r, eps);
        return std::pow(r, 12) * std::pow(std::max(x, r), -7) * g * g;
    };
    const double top = std::max(x, eps);
    double inner = quad.integrate(f, 0.0, top, {std::min(x, eps)});
    // beyond max(x, eps) the integrand is c r^-9
    const double c = std::pow(2.0 / 35.0, 2) * std::pow(eps, 10);
    inner += c * std::pow(top, -8) / 8.0;
    return 4.0 * std::pow(x, 4) * (2.0 / 7.0) * inner;
}

double clg_value(double x) {
    if (!(x > 0.0)) throw ParameterError("clg_value: x must be positive");
    if (x < 0.02) {
        const double x2 = x * x;
        return x2 * x2 * (1.0 / 15.0 + x2 * (-4.0 / 189.0 + x2 * (1.0 / 225.0 - x2 * 8.0 / 10395.0)));
    }
    if (x > 50.0) return 1.0 - 8.0 * x * x * x * std::exp(-2.0 * x);
    const double s = std::sinh(x);
    return 1.0 - x * x * x * std::cosh(x) / (s * s * s);
}

double gauge_h(double r) {
    if (!(r > 0.0 && r < 0.25)) throw ParameterError("gauge_h: r must lie in (0, 1/4)");
    return std::pow(r, 4) * std::log(std::log(1.0 / r));
}

double green9_integral(double x, const std::function<double(double)>& phi, const Quadrature& quad,
                      std::vector<double> breaks) {
    if (!(x > 0.0)) throw ParameterError("green9_integral: x must be positive");
    auto f = [&](double r) {
        const double v = phi(r);
        if (v == 0.0) return 0.0;
        return std::pow(r, 8) * v * std::pow(std::max(x, r), -7);
    };
    breaks.push_back(x);
    return (2.0 / 7.0) *
           quad.integrate(f, 0.0, std::numeric_limits<double>::infinity(), std::move(breaks));
}

} // namespace bsphere
