#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "bsphere/random.hpp"

namespace bsphere {

/// Real-valued path sampled on a uniform grid of n_steps cells over [0, duration].
struct GridPath {
    double duration = 0.0;
    std::vector<double> values;

    std::size_t n_steps() const noexcept { return values.empty() ? 0 : values.size() - 1; }
    double dt() const noexcept { return duration / static_cast<double>(n_steps()); }
    double time(std::size_t i) const noexcept { return dt() * static_cast<double>(i); }
};

/// True when values start and end at 0 and never go negative.
bool is_excursion(const GridPath& path) noexcept;

/// Brownian bridge from a to b over duration T on an n-step grid.
GridPath sample_bridge(RandomStream& rng, std::size_t n, double T, double a, double b);

/// Normalized excursion by the Vervaat transform of a bridge 0 -> 0.
/// Ties for the grid argmin go to the smallest index.
GridPath sample_normalized_excursion(RandomStream& rng, std::size_t n);

/// Brownian excursion of duration T, exact in law at the grid times
/// (three-dimensional Bessel bridge from 0 to 0).
GridPath sample_excursion(RandomStream& rng, std::size_t n, double T);

/// Uniform Dyck path of n (even) steps with heights scaled by sqrt(T/n),
/// drawn by the cycle lemma. Re-rooting at any grid index is a bijection on
/// these paths.
GridPath sample_dyck_excursion(RandomStream& rng, std::size_t n, double T);

struct DurationSample {
    double duration = 0.0;
    double importance_weight = 0.0;
};

/// Itô duration density (2 sqrt(2 pi t^3))^-1.
double ito_density(double t) noexcept;

/// Duration uniform on [a, b] weighted by (b - a) times the Itô density.
DurationSample sample_duration(RandomStream& rng, double a, double b);

/// Radial part of a 9-dimensional Brownian motion started at distance x0,
/// on the grid k*dt for k <= floor(horizon/dt).
GridPath sample_bessel9(RandomStream& rng, double x0, double dt, double horizon);

struct LastPassageOptions {
    double ceiling_factor = 20.0;
    double max_time = 1e6;
    /// Cells after the last grid visit below the level are bisected down to
    /// dt * 2^-bisection_depth to catch returns between grid points.
    int bisection_depth = 16;
};

/// Bessel(9) from 0 up to its last passage at `level`.
struct LastPassage {
    GridPath path;                   ///< radial values on the dt grid up to last_passage_index
    std::size_t last_passage_index = 0;  ///< last grid index not after the last passage
    double last_passage_time = 0.0;  ///< last time found below the level (grid or bisection)
    std::vector<double> times;       ///< all known sample times, increasing, ending at last_passage_time
    std::vector<std::array<double, 9>> points;  ///< 9-d positions at `times`

    /// Radial value at time t in [0, last_passage_time], bridged between known points.
    double radius_at(RandomStream& rng, double t) const;
};

/// Runs until the radius exceeds ceiling_factor*level; steps are dt inside
/// radius 2*level and larger multiples of dt outside, with skipped grid
/// points filled by Brownian bridges wherever the path later returns.
LastPassage bessel9_last_passage(RandomStream& rng, double level, double dt,
                                 const LastPassageOptions& opt = {});

/// Probability that a transient Bessel(9) at radius r ever hits `level`.
double bessel9_return_probability(double r, double level) noexcept;

/// Inverse Gaussian with mean mu and shape lambda (Michael-Schucany-Haas).
double sample_inverse_gaussian(RandomStream& rng, double mu, double lambda);

/// Minimum of a Brownian bridge a -> b over duration T.
double sample_bridge_min(RandomStream& rng, double a, double b, double T);

/// Minimum of a Brownian bridge a -> b over duration T conditioned to stay above floor.
/// If either endpoint sits on the floor the minimum is the floor.
double sample_bridge_min_above(RandomStream& rng, double a, double b, double T, double floor);

/// Time of the minimum of a Brownian bridge a -> b over duration T given its minimum m.
double sample_bridge_argmin(RandomStream& rng, double a, double b, double T, double m);

} // namespace bsphere
