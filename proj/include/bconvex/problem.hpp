#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bconvex/benefit.hpp"
#include "bconvex/geometry.hpp"
#include "bconvex/menu.hpp"

namespace bconvex {

struct SolverOptions {
    double rel_decrease_tol = 1e-9;
    int max_outer_iters = 600;
    double fd_param_step_rel = 1e-5; // scaled by diam(Y box)
    double grad_tol = 2e-3;          // convergence gate on fd directional derivatives
    int multi_start = 4;
    int split_period = 10;
    int prune_after = 5;
    int min_iters = 30;
    int patience = 3;                // flat iterations before stopping
    double init_step_rel = 0.02;     // line-search start, scaled by diam(Y box)
    double audit_h_max = 0.02;
    int audit_trials = 500;
    double audit_tol = 1e-4;
};

/// The discrete monopolist problem: grid, density, cost, benefit, null product.
struct ProblemSpec {
    BenefitFunction benefit;
    Grid x_grid;
    Grid y_grid;  // lattice for price-menu output and dual transforms
    ScalarFn density_f;
    double lambda = 1.0;
    ScalarFn cost_c;
    Eigen::VectorXd y_null;
    double a_null = 0.0;
    int menu_size = 32;
    std::uint64_t seed = 0;
    SolverOptions opts;

    int dim() const { return benefit.dim(); }

    BConvexFunction null_utility() const;
};

/// Midpoint-rule quadrature of [c(Yu(x)) - b(x,Yu(x)) + u(x)] f(x) over the
/// lattice. Since u(x) = b(x, Yu(x)) + a_w at the winning piece, the integrand
/// reduces to c(y_w) + a_w; b enters only through winner selection. Summation
/// is fixed-order pairwise, so the value is bit-stable.
double evaluate_L(const ProblemSpec& spec, const BConvexFunction& u);

/// Cached quadrature state for one menu: per-piece benefit rows over the
/// lattice, per-node top-3 pieces, f-weights. Supports exact trial evaluation
/// of single-piece moves and piece additions without touching other rows.
class MenuEvaluator {
public:
    MenuEvaluator(const ProblemSpec& spec, const BConvexFunction& u);

    const ProblemSpec& spec() const { return *spec_; }
    int piece_count() const { return static_cast<int>(pieces_.size()); }
    const std::vector<BAffinePiece>& pieces() const { return pieces_; }

    double current_L() const;

    /// L if piece `index` moved to (y, a), others fixed.
    double trial_L(int index, const Eigen::VectorXd& y, double a) const;

    /// L if a new piece (y, a) were added.
    double trial_add_L(const Eigen::VectorXd& y, double a) const;

    void apply_move(int index, const Eigen::VectorXd& y, double a);
    void remove_piece(int index);
    void add_piece(const Eigen::VectorXd& y, double a);

    int winner(std::int64_t node) const { return idx1_[node]; }
    double u_value(std::int64_t node) const { return val1_[node]; }
    double piece_cost(int i) const { return cost_[static_cast<std::size_t>(i)]; }
    /// Nodes won per piece.
    std::vector<std::int64_t> winner_counts() const;

    /// max over nodes of b(x,y) - u(x); the touching intercept is its negation.
    double max_gain(const Eigen::VectorXd& y) const;

    BConvexFunction menu() const;

private:
    void rebuild_topk();
    void rebuild_node(std::int64_t j);
    double L_from_terms(const std::vector<double>& terms) const;
    void fill_piece_cache(int index);

    const ProblemSpec* spec_;
    std::vector<BAffinePiece> pieces_;
    std::vector<Eigen::VectorXd> rows_; // rows_[i][node] = b(x_node, y_i)
    std::vector<double> cost_;          // c(y_i)
    Eigen::VectorXd fw_;                // f(x) * cell_volume per node
    // per-node top-3 piece values/indices (value desc, index asc on ties)
    std::vector<double> val1_, val2_, val3_;
    std::vector<int> idx1_, idx2_, idx3_;
};

} // namespace bconvex
