// Independent oracles shared by the test suites. Everything here is computed
// from closed forms or brute force, never through the library paths it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bconvex/benefit.hpp"
#include "bconvex/menu.hpp"

namespace oracles {

// ---- 1D monopolist benchmark: X=[0,1], b=xy, c=y^2/2, f=1, null (0,0) ----
// Closed-form minimizer: u(x) = x^2 - x + 1/4 above 1/2, zero below.

inline double rc1d_u(double x) {
    return x >= 0.5 ? x * x - x + 0.25 : 0.0;
}

inline double rc1d_du(double x) { return x >= 0.5 ? 2.0 * x - 1.0 : 0.0; }

// L[u*] by antidifferentiation: the integrand (1/2)u'^2 + u - x u' vanishes on
// [0,1/2] and equals x^2 - 2x + 3/4 on [1/2,1], whose antiderivative is
// x^3/3 - x^2 + 3x/4; the difference of endpoint values is -1/12.
inline double rc1d_L() {
    const auto F = [](double x) { return x * x * x / 3.0 - x * x + 0.75 * x; };
    return F(1.0) - F(0.5);
}

// Tangent menu of the closed form: null piece plus m tangents on the active
// region. With bilinear b these are exact b-affine supports of u*.
inline bconvex::BConvexFunction rc1d_tangent_menu(const bconvex::BenefitFunction& b, int m) {
    bconvex::BAffinePiece null_piece;
    null_piece.y = Eigen::VectorXd::Zero(1);
    null_piece.a = 0.0;
    bconvex::BConvexFunction u(b, null_piece);
    for (int i = 0; i < m; ++i) {
        const double xt = 0.5 + (i + 0.5) * 0.5 / m;
        bconvex::BAffinePiece p;
        p.y = Eigen::VectorXd::Constant(1, rc1d_du(xt));
        p.a = rc1d_u(xt) - xt * rc1d_du(xt);
        u.add_piece(std::move(p));
    }
    return u;
}

// ---- 2D disc benchmark: X = unit ball, b = x.y, c = |y|^2/2, f = 1 ----
// Radial stationary profile: U'(r) = (3/2) r - (3/2) r0^2 / r on [r0, 1] with
// r0 = 1/sqrt(3) (so U'(1) = 1), U = 0 inside r0.

inline double disc_r0() { return 1.0 / std::sqrt(3.0); }

inline double disc_dU(double r) {
    const double r0 = disc_r0();
    return r <= r0 ? 0.0 : 1.5 * r - 1.5 * r0 * r0 / r;
}

inline double disc_U(double r) {
    const double r0 = disc_r0();
    if (r <= r0) return 0.0;
    return 0.75 * (r * r - r0 * r0) - 1.5 * r0 * r0 * std::log(r / r0);
}

// L of the radial profile via Simpson quadrature of
// 2*pi*[U'^2/2 + U - r U'] r dr on [r0, 1].
inline double disc_L(int intervals = 4096) {
    const double r0 = disc_r0();
    const auto f = [&](double r) {
        const double du = disc_dU(r);
        return (0.5 * du * du + disc_U(r) - r * du) * r;
    };
    const double h = (1.0 - r0) / intervals;
    double s = f(r0) + f(1.0);
    for (int i = 1; i < intervals; ++i) s += f(r0 + i * h) * (i % 2 ? 4.0 : 2.0);
    return 2.0 * 3.14159265358979323846 * s * h / 3.0;
}

// ---- generic helpers ----

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd g(x.size());
    for (int d = 0; d < x.size(); ++d) {
        Eigen::VectorXd xp = x, xm = x;
        xp[d] += h;
        xm[d] -= h;
        g[d] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

// Lower convex hull of a 1D graph (Andrew monotone chain), evaluated back at
// the sample points. Brute-force oracle for the bilinear envelope.
inline std::vector<double> lower_convex_hull(const std::vector<double>& xs,
                                             const std::vector<double>& vals) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> hull;
    for (std::size_t i = 0; i < n; ++i) {
        while (hull.size() >= 2) {
            const std::size_t a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            const double cross = (xs[b] - xs[a]) * (vals[i] - vals[a]) -
                                 (xs[i] - xs[a]) * (vals[b] - vals[a]);
            if (cross <= 0.0) hull.pop_back();
            else break;
        }
        hull.push_back(i);
    }
    std::vector<double> env(n);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (seg + 1 < hull.size() && xs[hull[seg + 1]] < xs[i]) ++seg;
        if (seg + 1 >= hull.size()) { env[i] = vals[hull.back()]; continue; }
        const std::size_t a = hull[seg], b = hull[seg + 1];
        const double t = (xs[i] - xs[a]) / (xs[b] - xs[a]);
        env[i] = (1.0 - t) * vals[a] + t * vals[b];
    }
    return env;
}

inline bconvex::Box box1d(double lo, double hi) {
    bconvex::Box b;
    b.lower = Eigen::VectorXd::Constant(1, lo);
    b.upper = Eigen::VectorXd::Constant(1, hi);
    return b;
}

inline bconvex::Box box2d(double lo, double hi) {
    bconvex::Box b;
    b.lower = Eigen::VectorXd::Constant(2, lo);
    b.upper = Eigen::VectorXd::Constant(2, hi);
    return b;
}

inline Eigen::VectorXd vec1(double a) { return Eigen::VectorXd::Constant(1, a); }

inline Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

} // namespace oracles
