#include "bsphere/random.hpp"

#include <cmath>

#include <boost/math/distributions/poisson.hpp>

namespace bsphere {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

RandomStream::RandomStream(std::uint64_t root_seed, std::uint64_t stream_index,
                           std::uint64_t position) noexcept
    : root_(root_seed), index_(stream_index), position_(position) {
    key_a_ = mix64(root_seed + kGolden);
    key_b_ = mix64(key_a_ ^ mix64(stream_index + kStreamSalt));
}

std::uint64_t RandomStream::output(std::uint64_t p) const noexcept {
    return mix64(mix64(p * kGolden + key_a_) ^ key_b_);
}

double RandomStream::normal() noexcept { return normal_quantile(uniform_open()); }

double RandomStream::exponential() noexcept { return -std::log(uniform_open()); }

std::uint64_t RandomStream::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    const double u = uniform_open();
    if (mean < 30.0) {
        // chop-down inversion
        double p = std::exp(-mean);
        double f = p;
        std::uint64_t k = 0;
        while (u > f && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            f += p;
        }
        return k;
    }
    using namespace boost::math::policies;
    using Policy = policy<discrete_quantile<integer_round_up>>;
    boost::math::poisson_distribution<double, Policy> dist(mean);
    return static_cast<std::uint64_t>(boost::math::quantile(dist, u));
}

RandomStream RandomStream::split() noexcept {
    const std::uint64_t child = next_u64();
    return RandomStream(root_ ^ mix64(child), mix64(index_ + child));
}

// Wichura, Algorithm AS241 (PPND16), relative accuracy about 1e-16.
double normal_quantile(double p) noexcept {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                     67265.770927008700853) * r + 45921.953931549871457) * r +
                   13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((5226.495278852545925 * r + 28729.085735721942674) * r +
                     39307.89580009271061) * r + 21213.794301586595867) * r +
                   5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    if (r <= 0.0) return q < 0.0 ? -HUGE_VAL : HUGE_VAL;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                  0.24178072517745061177) * r + 1.27045825245236838258) * r +
                3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                  0.0151986665636164571966) * r + 0.14810397642748007459) * r +
                0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  0.0012426609473880784386) * r + 0.026532189526576123093) * r +
                0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                  1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
                0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -x : x;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

} // namespace bsphere
