#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "bconvex/numerics.hpp"

namespace bconvex {

/// Deterministic RNG. Distributions are hand-rolled on top of mt19937_64 so
/// streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller without the cached spare, to keep the stream position obvious.
    double normal() {
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    Eigen::VectorXd normal_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    Eigen::VectorXd unit_vector(int n) {
        Eigen::VectorXd v = normal_vector(n);
        double s = v.norm();
        if (s < 1e-300) { v.setZero(); v[0] = 1.0; s = 1.0; }
        return v / s;
    }

private:
    std::mt19937_64 eng_;
};

/// Radical-inverse / Halton low-discrepancy sequence (bases 2,3,5,...).
double radical_inverse(std::uint64_t i, std::uint64_t base);
Eigen::VectorXd halton_point(std::uint64_t index, int dim);

} // namespace bconvex
