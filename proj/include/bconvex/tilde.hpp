#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "bconvex/benefit.hpp"
#include "bconvex/menu.hpp"

namespace bconvex {

/// Normalized coordinates at an anchor pair (x0, y0):
///   x~(x) = b_y(x, y0) - b_y(x0, y0)
///   y~(y) = N (b_x(x0, y) - b_x(x0, y0)),   N = [b_xy(x0,y0)]^{-1}.
/// The normalizer acts on the y side only, making the transformed benefit's
/// cross derivative the identity at the origin. In these coordinates the
/// transformed utility of a b-convex function anchored at a support is convex,
/// and the transformed benefit is x~.y~ plus a fourth-order remainder.
class TildeChart {
public:
    TildeChart(const BenefitFunction& b, Eigen::VectorXd x0, Eigen::VectorXd y0);

    const BenefitFunction& benefit() const { return *b_; }
    const Eigen::VectorXd& x0() const { return x0_; }
    const Eigen::VectorXd& y0() const { return y0_; }
    const Eigen::MatrixXd& normalizer() const { return normalizer_; }

    Eigen::VectorXd to_tilde_x(const Eigen::VectorXd& x) const;
    Eigen::VectorXd to_tilde_y(const Eigen::VectorXd& y) const;
    Eigen::VectorXd from_tilde_x(const Eigen::VectorXd& tx) const; // NoPreimage on failure
    Eigen::VectorXd from_tilde_y(const Eigen::VectorXd& ty) const;

    /// u~(x~) = u(x) - [u(x0) + b(x,y0) - b(x0,y0)]. Nonnegative with
    /// u~(0) = 0 when y0 is the assigned product at x0.
    double tilde_u(const BConvexFunction& u, const Eigen::VectorXd& tx) const;

    /// b~(x~,y~) = b(x,y) - [b(x0,y) + b(x,y0) - b(x0,y0)].
    double tilde_b(const Eigen::VectorXd& tx, const Eigen::VectorXd& ty) const;

private:
    const BenefitFunction* b_;
    Eigen::VectorXd x0_, y0_;
    Eigen::MatrixXd normalizer_;     // [b_xy(x0,y0)]^{-1}
    Eigen::MatrixXd cross_at_anchor_; // b_xy(x0,y0)
    Eigen::VectorXd bx_at_anchor_, by_at_anchor_;
    double b_at_anchor_ = 0.0;
};

struct TildeGeometryReport {
    // min over probe segments of (u~(p)+u~(q))/2 - u~((p+q)/2); >= -tol when convex
    double min_midpoint_defect = 0.0;
    // max over probes of |b~(x~,y~) - x~.y~| / (|x~|^2 |y~|^2)
    double max_expansion_ratio = 0.0;
    // max violation of midpoint membership over sampled sublevel-set pairs
    double section_defect = 0.0;
    int probes_used = 0;
};

/// Numeric verification of the transformed-geometry facts: convexity of u~
/// by midpoint sampling, boundedness of the fourth-order expansion remainder,
/// and convexity of the sublevel sets of u~.
TildeGeometryReport verify_tilde_geometry(const TildeChart& chart, const BConvexFunction& u,
                                          int probes, std::uint64_t seed,
                                          double probe_radius_frac = 0.2);

} // namespace bconvex
