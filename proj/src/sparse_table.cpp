#include "bsphere/sparse_table.hpp"

#include <algorithm>
#include <bit>

namespace bsphere {

SparseTable::SparseTable(std::span<const double> values) : n_(values.size()) {
    if (n_ == 0) return;
    levels_.emplace_back(values.begin(), values.end());
    for (std::size_t w = 1; 2 * w <= n_; w *= 2) {
        const auto& prev = levels_.back();
        std::vector<double> cur(n_ - 2 * w + 1);
        for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = std::min(prev[i], prev[i + w]);
        levels_.push_back(std::move(cur));
    }
}

double SparseTable::min(std::size_t lo, std::size_t hi) const noexcept {
    const std::size_t len = hi - lo + 1;
    const int k = std::bit_width(len) - 1;
    const auto& row = levels_[static_cast<std::size_t>(k)];
    return std::min(row[lo], row[hi + 1 - (std::size_t{1} << k)]);
}

} // namespace bsphere
