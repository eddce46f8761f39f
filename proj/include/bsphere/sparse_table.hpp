#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bsphere {

/// Static range-minimum structure: O(n log n) build, O(1) query.
class SparseTable {
public:
    SparseTable() = default;
    explicit SparseTable(std::span<const double> values);

    /// Minimum over the closed index range [lo, hi]; requires lo <= hi < size().
    double min(std::size_t lo, std::size_t hi) const noexcept;
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_ = 0;
    std::vector<std::vector<double>> levels_;
};

} // namespace bsphere
