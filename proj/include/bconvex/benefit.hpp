#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bconvex/expr.hpp"
#include "bconvex/geometry.hpp"

namespace bconvex {

enum class BenefitFamily { Bilinear, QuadraticDistance, UserDefined };

/// Scalar field over a point (used for costs and densities).
using ScalarFn = std::function<double(const Eigen::VectorXd&)>;

/// A smooth benefit b(x,y) on a closed product domain, with the primitives the
/// generalized-convexity machinery needs: derivatives, the momentum inversion
/// Y(x,p) with b_x(x,Y(x,p)) = p, and b*-segments.
///
/// Built-in families use closed-form derivatives; user-defined families use
/// central differences with step fd_step scaled by the domain extent.
class BenefitFunction {
public:
    static BenefitFunction bilinear(Box x_domain, Box y_domain);
    static BenefitFunction quadratic_distance(Box x_domain, Box y_domain);
    static BenefitFunction user_defined(const std::string& expression, Box x_domain,
                                        Box y_domain, double fd_step = 1e-4);

    BenefitFamily family() const { return family_; }
    int dim() const { return x_domain_.dim(); }
    const Box& x_domain() const { return x_domain_; }
    const Box& y_domain() const { return y_domain_; }
    double fd_step() const { return fd_step_; }
    const std::string& expression() const { return expr_.source(); }

    /// b(x,y); DomainError outside the closed product domain.
    double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

    /// b at every row of pts against one y (no domain check; pts are trusted
    /// quadrature nodes). Vectorized for the built-in families.
    void eval_row(const Eigen::MatrixXd& pts, const Eigen::VectorXd& y,
                  Eigen::VectorXd& out) const;

    /// b of one x against every row of y_pts.
    void eval_col(const Eigen::VectorXd& x, const Eigen::MatrixXd& y_pts,
                  Eigen::VectorXd& out) const;

    Eigen::VectorXd grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    Eigen::VectorXd grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

    /// Cross derivative matrix, entry (i,j) = d2 b / dx_i dy_j.
    Eigen::MatrixXd cross_hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    Eigen::MatrixXd hessian_xx(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

    /// Y(x,p): the y with |b_x(x,y) - p| <= newton_tol. Damped Newton from the
    /// product-domain center; damping halves on overshoot outside the domain.
    /// Throws NoPreimage if it fails to converge inside the domain.
    Eigen::VectorXd invert_Y(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const;

    /// Dual inversion: the x with b_y(x, y) = q.
    Eigen::VectorXd invert_X(const Eigen::VectorXd& y, const Eigen::VectorXd& q) const;

    static constexpr double newton_tol = 1e-10;
    static constexpr int newton_max_iter = 100;

private:
    BenefitFunction() = default;
    double eval_raw(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    void validate() const;

    BenefitFamily family_ = BenefitFamily::Bilinear;
    Box x_domain_, y_domain_;
    double fd_step_ = 1e-4;
    Expr expr_; // UserDefined only
};

/// Product curve whose momenta b_x(x0, y_t) interpolate linearly between the
/// endpoint momenta.
struct BStarSegment {
    Eigen::VectorXd x0;
    Eigen::VectorXd y_start;
    Eigen::VectorXd y_end;
    std::vector<std::pair<double, Eigen::VectorXd>> samples; // (t, y_t)
};

/// k+1 samples of the b*-segment joining y0 to y1 with respect to x0.
/// NoPreimage propagates when the momentum chord leaves the attainable range.
BStarSegment bstar_segment(const BenefitFunction& b, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& y0, const Eigen::VectorXd& y1, int k);

/// Fourth-order mixed form: second difference in p, along eta, of
/// p -> xi^T b_xx(x, Y(x,p)) xi. Nonnegative for all inputs iff the benefit
/// satisfies the B3 condition (sampled check).
double check_B3(const BenefitFunction& b, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                const Eigen::VectorXd& xi, const Eigen::VectorXd& eta, double fd_step_p);

struct LoeperReport {
    double max_excess = 0.0;            // max of g(t) - max(g(0), g(1)) over samples
    double min_second_difference = 0.0; // convexity witness of t -> g(t)
};

/// Loeper maximum principle check along the b*-segment joining y0 to y1 with
/// respect to x0: g(x,t) = b(x,y_t) - b(x0,y_t) must peak at the endpoints.
LoeperReport check_loeper(const BenefitFunction& b, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                          std::span<const Eigen::VectorXd> x_samples, int t_samples);

/// Minimum, over zipped (x,p) samples, of the smallest eigenvalue of the
/// p-Hessian (central differences) of p -> c(Y(x,p)) - b(x, Y(x,p)).
/// A positive return is the admissibility gate for the cost c.
double check_uniform_bstar_convexity(const BenefitFunction& b, const ScalarFn& cost,
                                     std::span<const Eigen::VectorXd> xs,
                                     std::span<const Eigen::VectorXd> ps,
                                     double fd_step = 1e-3);

} // namespace bconvex
