#pragma once

#include <cstdint>

namespace bsphere {

/// Counter-based random stream.
///
/// The value drawn at `position` is a pure function of
/// (root_seed, stream_index, position):
///
///     key_a  = mix64(root_seed + 0x9e3779b97f4a7c15)
///     key_b  = mix64(key_a ^ mix64(stream_index + 0xd1b54a32d192ed03))
///     out(p) = mix64(mix64(p * 0x9e3779b97f4a7c15 + key_a) ^ key_b)
///
/// where mix64 is the SplitMix64 finalizer. This derivation rule is frozen
/// for the 1.x series; changing it changes every stored result.
///
/// Replicas use distinct stream indices under one root seed. Gaussians are
/// produced by the inverse normal CDF (Wichura AS241) applied to one uniform,
/// so every draw consumes exactly one position.
class RandomStream {
public:
    RandomStream(std::uint64_t root_seed, std::uint64_t stream_index,
                 std::uint64_t position = 0) noexcept;

    std::uint64_t root_seed() const noexcept { return root_; }
    std::uint64_t stream_index() const noexcept { return index_; }
    std::uint64_t position() const noexcept { return position_; }

    std::uint64_t next_u64() noexcept { return output(position_++); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() noexcept;
    double exponential() noexcept;
    std::uint64_t poisson(double mean);

    /// Independent child stream; consumes one draw from this stream.
    RandomStream split() noexcept;

    std::uint64_t output(std::uint64_t position) const noexcept;

private:
    std::uint64_t root_;
    std::uint64_t index_;
    std::uint64_t position_;
    std::uint64_t key_a_;
    std::uint64_t key_b_;
};

/// Inverse of the standard normal CDF (AS241), relative accuracy about 1e-16.
double normal_quantile(double p) noexcept;

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

} // namespace bsphere
