#include "bconvex/rng.hpp"

#include <array>

namespace bconvex {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double scale = inv;
    double value = 0.0;
    while (i > 0) {
        value += static_cast<double>(i % base) * scale;
        i /= base;
        scale *= inv;
    }
    return value;
}

Eigen::VectorXd halton_point(std::uint64_t index, int dim) {
    static constexpr std::array<std::uint64_t, 10> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
    Eigen::VectorXd p(dim);
    for (int d = 0; d < dim; ++d) {
        p[d] = radical_inverse(index, primes[static_cast<std::size_t>(d) % primes.size()]);
    }
    return p;
}

} // namespace bconvex
