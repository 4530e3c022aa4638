#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bconvex {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Fixed-order pairwise summation. The reduction tree depends only on n, so
/// results are bit-stable no matter how the terms buffer was filled.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(std::span<const double> v) {
    return pairwise_sum(v.data(), v.size());
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

} // namespace bconvex
