// Order-insensitive, accuracy-friendly reductions. All ensemble statistics go
// through these so that results do not depend on thread count.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fcsl {

// Pairwise (cascade) summation: error grows like O(log n * eps) and the
// result depends only on element order, never on scheduling.
inline double pairwise_sum(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n <= 8) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double pairwise_mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return pairwise_sum(x) / static_cast<double>(x.size());
}

} // namespace fcsl
