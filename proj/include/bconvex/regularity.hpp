#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bconvex/problem.hpp"
#include "bconvex/tilde.hpp"

namespace bconvex {

struct GapResult {
    double h = 0.0;              // sup over the sphere sample of u minus its support
    Eigen::VectorXd direction;   // unit direction of the maximizer
    Eigen::VectorXd x_max;       // x0 + r * direction
};

struct ScanRow {
    Eigen::VectorXd x0;
    double r = 0.0;
    double h = 0.0;
    double ratio = 0.0; // h / r^2
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double max_ratio = 0.0;
};

/// Per-probe record of the comparison-function construction.
struct TrialReport {
    Eigen::VectorXd x0;
    double r = 0.0;
    double h = 0.0;
    double ratio = 0.0;
    double kappa = 0.0;              // first component of the tilde gradient at the gap maximizer
    Eigen::VectorXd y_star;
    double slab_width_over_r = 0.0;  // extent of the section along the gap axis, tilde frame
    double height_defect = 0.0;      // max over S of (p* - u) minus h; <= 0 expected
    double energy_lhs = 0.0;         // section average of the cost-comparison integrand
    double energy_margin = 0.0;      // L[max(u,p*)] - L[u]; >= 0 for minimizers
    double section_mass = 0.0;
    std::int64_t section_nodes = 0;
};

struct BilinearTrialReport {
    double h = 0.0;
    double containment_defect = 0.0; // max over S of |x^1| - r
    double grad_sq_integral = 0.0;   // integral over S of |Du - D sigma_h|^2
    double jensen_rhs = 0.0;         // (h^2/r^2) |S|
    double upper_bound_rhs = 0.0;    // (n+1) * integral over S of (sigma_h - u)
    double section_mass = 0.0;
    std::int64_t section_nodes = 0;
};

struct KinkReport {
    double boundary = 0.0;          // coordinate (1D) or radius (2D) of the first non-null node
    std::int64_t boundary_node = 0; // index along the probe line
    double left_second_diff = 0.0;
    double right_second_diff = 0.0;
    double jump = 0.0;
};

struct KinkOptions {
    double probe_step_frac = 0.08; // second-difference step as a fraction of the extent
    int phase_count = 9;           // offsets averaged to tame piecewise-affine sampling noise
    int direction_axis = 0;        // ray direction for radial scans
};

/// C^{1,1} phenomenology on a solved utility: support gaps h and ratios h/r^2,
/// the comparison-function construction (y*, section S, slab containment,
/// height and energy comparisons), and second-derivative jumps across the
/// nonparticipation boundary. All probes are pure reads of the solution.
class RegularityLab {
public:
    RegularityLab(const ProblemSpec& spec, const BConvexFunction& u);

    /// h over the sphere sample: 2 endpoints in 1D, 64 directions in 2D.
    /// DomainError if the ball pokes out of the domain.
    GapResult support_gap(const Eigen::VectorXd& x0, double r) const;

    ScanResult c11_scan(const std::vector<Eigen::VectorXd>& x0s, const std::vector<double>& rs) const;

    /// Builds the trial b-affine function p* at (x0, r): in the tilde chart at
    /// (x0, Yu(x0)), rotated so the gap maximizer sits on the first axis, y*
    /// solves b_x = (h/2r) e1; p* = b(.,y*) - b(x_max,y*) + u(x_max).
    /// HNonPositive when h = 0; NoPreimage when the momentum is inadmissible.
    TrialReport trial_function(const Eigen::VectorXd& x0, double r) const;

    /// The flat comparison function max{u, (h/2r)(x^1 + r)} in the rotated
    /// frame; bilinear benefits only (FamilyError otherwise).
    BilinearTrialReport bilinear_trial(const Eigen::VectorXd& x0, double r) const;

    /// Locates the nonparticipation boundary along a coordinate line (1D) or
    /// a ray from the domain center (2D+), and measures one-sided second
    /// differences of u on each side. NoBoundary when the assignment never
    /// switches.
    KinkReport kink_scan(const KinkOptions& options = {}) const;

    const BConvexFunction& utility() const { return *u_; }
    const ProblemSpec& spec() const { return *spec_; }

private:
    std::vector<Eigen::VectorXd> sphere_directions() const;

    const ProblemSpec* spec_;
    const BConvexFunction* u_;
    MenuEvaluator eval_; // winners/L cached for energy margins
};

} // namespace bconvex
