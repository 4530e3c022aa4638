#include "bconvex/menu.hpp"

#include <limits>

namespace bconvex {

BConvexFunction::BConvexFunction(const BenefitFunction& b, BAffinePiece null_piece)
    : benefit_(&b) {
    if (!b.y_domain().contains(null_piece.y, 1e-9))
        throw DomainError("null product lies outside the product domain");
    null_piece.frozen = true;
    pieces_.push_back(std::move(null_piece));
}

void BConvexFunction::add_piece(BAffinePiece piece) {
    if (!benefit_->y_domain().contains(piece.y, 1e-9))
        throw DomainError("menu product lies outside the product domain");
    piece.frozen = false;
    pieces_.push_back(std::move(piece));
}

void BConvexFunction::remove_piece(int index) {
    if (index <= 0 || index >= piece_count())
        throw DomainError("cannot remove the frozen null piece or an out-of-range piece");
    pieces_.erase(pieces_.begin() + index);
}

void BConvexFunction::set_piece(int index, const Eigen::VectorXd& y, double a) {
    if (index <= 0 || index >= piece_count())
        throw DomainError("cannot modify the frozen null piece or an out-of-range piece");
    if (!benefit_->y_domain().contains(y, 1e-9))
        throw DomainError("menu product lies outside the product domain");
    pieces_[static_cast<std::size_t>(index)].y = y;
    pieces_[static_cast<std::size_t>(index)].a = a;
}

std::pair<double, int> BConvexFunction::eval_with_winner(const Eigen::VectorXd& x) const {
    if (!benefit_->x_domain().contains(x, 1e-9))
        throw DomainError("utility evaluated outside the consumer domain");
    double best = -std::numeric_limits<double>::infinity();
    int winner = 0;
    for (int i = 0; i < piece_count(); ++i) {
        const auto& p = pieces_[static_cast<std::size_t>(i)];
        const double v = benefit_->eval(x, p.y) + p.a;
        if (v > best) { // strict: ties keep the lowest index
            best = v;
            winner = i;
        }
    }
    return {best, winner};
}

double BConvexFunction::eval(const Eigen::VectorXd& x) const { return eval_with_winner(x).first; }

Eigen::VectorXd BConvexFunction::assigned_product(const Eigen::VectorXd& x) const {
    return pieces_[static_cast<std::size_t>(eval_with_winner(x).second)].y;
}

int BConvexFunction::winner_index(const Eigen::VectorXd& x) const {
    return eval_with_winner(x).second;
}

BAffinePiece BConvexFunction::support_at(const Eigen::VectorXd& x0, const Grid* check_grid) const {
    const auto [u0, w] = eval_with_winner(x0);
    BAffinePiece support;
    support.y = pieces_[static_cast<std::size_t>(w)].y;
    support.a = u0 - benefit_->eval(x0, support.y);
    support.frozen = false;
    if (check_grid) {
        for (std::int64_t i = 0; i < check_grid->active_count(); ++i) {
            const Eigen::VectorXd x = check_grid->node(i);
            const double gap = benefit_->eval(x, support.y) + support.a - eval(x);
            if (gap > 1e-10)
                throw SupportViolation("support piece exceeds the utility by " +
                                       std::to_string(gap) + " on the check grid");
        }
    }
    return support;
}

} // namespace bconvex
