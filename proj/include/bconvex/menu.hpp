#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bconvex/benefit.hpp"

namespace bconvex {

/// One menu item: x -> b(x,y) + a. The null piece (outside option) is frozen.
struct BAffinePiece {
    Eigen::VectorXd y;
    double a = 0.0;
    bool frozen = false;
};

/// Indirect utility as a finite max of b-affine pieces. Piece 0 is always the
/// frozen null piece, so admissibility (u >= null utility) is structural.
/// Holds a non-owning reference to the benefit; keep the benefit alive.
class BConvexFunction {
public:
    BConvexFunction(const BenefitFunction& b, BAffinePiece null_piece);

    const BenefitFunction& benefit() const { return *benefit_; }
    const std::vector<BAffinePiece>& pieces() const { return pieces_; }
    int piece_count() const { return static_cast<int>(pieces_.size()); }

    void add_piece(BAffinePiece piece); // forced non-frozen
    void remove_piece(int index);       // null piece refuses
    void set_piece(int index, const Eigen::VectorXd& y, double a);

    /// Max over pieces and the attaining index; ties break to the lowest index.
    std::pair<double, int> eval_with_winner(const Eigen::VectorXd& x) const;
    double eval(const Eigen::VectorXd& x) const;

    /// Yu(x): the product of the winning piece.
    Eigen::VectorXd assigned_product(const Eigen::VectorXd& x) const;
    int winner_index(const Eigen::VectorXd& x) const;

    /// The b-support at x0: piece (y0, a) touching u at x0 from below, with
    /// y0 the assigned product and a = u(x0) - b(x0,y0). When check_grid is
    /// given, verifies the piece stays <= u over the grid (SupportViolation
    /// beyond 1e-10 signals a non-b-convex input).
    BAffinePiece support_at(const Eigen::VectorXd& x0, const Grid* check_grid = nullptr) const;

private:
    const BenefitFunction* benefit_;
    std::vector<BAffinePiece> pieces_;
};

} // namespace bconvex
