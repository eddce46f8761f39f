#pragma once

#include <functional>
#include <vector>

namespace bsphere {

/// Adaptive Gauss-Kronrod integration with forced breakpoints.
struct Quadrature {
    double rel_tol = 1e-10;
    unsigned max_depth = 20;
    /// Kronrod order, 15, 21, 31, 41 or 51.
    unsigned points = 21;

    /// Integral over [a, b]; b may be +infinity. Throws QuadratureError when
    /// the error estimate exceeds rel_tol * |value| (plus a tiny absolute floor).
    double integrate(const std::function<double(double)>& f, double a, double b) const;

    /// Sum of integrals over the pieces cut at the given points inside (a, b).
    double integrate(const std::function<double(double)>& f, double a, double b,
                     std::vector<double> breaks) const;
};

/// N_x(W* <= y) = 3 / (2 (x - y)^2), y < x.
double min_tail(double x, double y);

/// Itô excursion measure of durations above s: (2 pi s)^-1/2.
double ito_tail(double s);

/// (2/7) * integral_0^eps u^4 (y v u)^-7 du, closed form.
double green_ball_kernel(double y, double eps);

/// N_x( int 1{W_s <= eps} ds ; W* > 0 ) = x^4 * green_ball_kernel(x, eps).
double first_moment(double x, double eps);

/// N_x( (int 1{W_s <= eps} ds)^2 ; W* > 0 )
///   = 4 x^4 (2/7) int_0^inf rho^12 (x v rho)^-7 g(rho)^2 drho,  g = green_ball_kernel(., eps).
double second_moment(double x, double eps, const Quadrature& quad = {});

/// 1 - x^3 cosh(x) / sinh(x)^3.
double clg_value(double x);

/// Gauge function r^4 log log(1/r) on (0, 1/4).
double gauge_h(double r);

/// int_0^inf dt E_x[phi(R_t)] for a 9-dimensional Bessel process R started at x,
/// computed as (2/7) int_0^inf rho^8 phi(rho) (x v rho)^-7 drho.
/// Extra breakpoints (kinks of phi) may be supplied.
double green9_integral(double x, const std::function<double(double)>& phi,
                       const Quadrature& quad = {}, std::vector<double> breaks = {});

} // namespace bsphere
