#pragma once

#include <cstdint>
#include <vector>

#include "bconvex/problem.hpp"

namespace bconvex {

struct IterateRecord {
    int iter = 0;
    double L = 0.0;
    int piece_count = 0;
};

struct Solution {
    BConvexFunction u;
    std::vector<int> assignment; // winner index per active grid node
    double L_value = 0.0;
    double profit = 0.0; // = -L for a unit-mass-normalized null; always -L here
    bool converged = false;
    double max_grad = 0.0; // worst fd directional derivative at exit
    std::uint64_t seed_used = 0;
    std::vector<IterateRecord> log;
};

/// Minimizes L over finite menus by block coordinate descent: per piece, a
/// finite-difference gradient step on (y_i, a_i) with backtracking line search;
/// pieces inactive for prune_after iterations are pruned; the largest-mass
/// piece is duplicated (seeded jitter) every split_period iterations up to
/// menu_size. Deterministic given the seed. Throws AdmissibilityError when the
/// cost fails the uniform b*-convexity gate.
Solution solve_single(const ProblemSpec& spec, std::uint64_t seed);

/// Multi-start driver: opts.multi_start seeds (spec.seed + k), best L wins,
/// ties by seed order.
Solution solve(const ProblemSpec& spec);

/// L[max(u,p)] - L[u]. Exactly zero when p never exceeds u on the lattice.
double audit_margin(const ProblemSpec& spec, const BConvexFunction& u, const BAffinePiece& p);

struct AuditResult {
    double worst_margin = 0.0;
    int trials = 0;
    double h_max = 0.0;
    BAffinePiece worst_piece;
};

/// Random b-affine perturbations p (y uniform over the product domain,
/// intercept set so max(p-u)+ lands in (0, h_max]); reports the minimum of
/// L[max(u,p)] - L[u]. Margins below -audit_tol expose non-minimality.
AuditResult perturbation_audit(const ProblemSpec& spec, const Solution& sol, int trials,
                               std::uint64_t seed);

struct PriceMenu {
    GridFunction v;            // on spec.y_grid
    double null_defect = 0.0;  // v(y_null) - (-a_null)
};

/// v(y) = max_x b(x,y) - u(x) over the lattice, plus the null-price
/// consistency defect evaluated at the exact null product.
PriceMenu price_menu(const ProblemSpec& spec, const Solution& sol);

} // namespace bconvex
