#include "bconvex/problem.hpp"

#include <algorithm>
#include <limits>

#include "bconvex/numerics.hpp"
#include "bconvex/parallel.hpp"

namespace bconvex {

BConvexFunction ProblemSpec::null_utility() const {
    BAffinePiece null_piece;
    null_piece.y = y_null;
    null_piece.a = a_null;
    return BConvexFunction(benefit, null_piece);
}

MenuEvaluator::MenuEvaluator(const ProblemSpec& spec, const BConvexFunction& u)
    : spec_(&spec), pieces_(u.pieces()) {
    const std::int64_t n = spec.x_grid.active_count();
    fw_.resize(n);
    const double vol = spec.x_grid.cell_volume();
    for (std::int64_t j = 0; j < n; ++j) fw_[j] = spec.density_f(spec.x_grid.node(j)) * vol;
    rows_.resize(pieces_.size());
    cost_.resize(pieces_.size());
    for (int i = 0; i < piece_count(); ++i) fill_piece_cache(i);
    val1_.resize(n); val2_.resize(n); val3_.resize(n);
    idx1_.resize(n); idx2_.resize(n); idx3_.resize(n);
    rebuild_topk();
}

void MenuEvaluator::fill_piece_cache(int index) {
    const auto& p = pieces_[static_cast<std::size_t>(index)];
    spec_->benefit.eval_row(spec_->x_grid.nodes(), p.y, rows_[static_cast<std::size_t>(index)]);
    cost_[static_cast<std::size_t>(index)] = spec_->cost_c(p.y);
}

void MenuEvaluator::rebuild_topk() {
    const std::int64_t n = spec_->x_grid.active_count();
    const int P = piece_count();
    parallel_for(n, [&](std::int64_t j) {
        double v1 = -std::numeric_limits<double>::infinity(), v2 = v1, v3 = v1;
        int i1 = -1, i2 = -1, i3 = -1;
        for (int i = 0; i < P; ++i) {
            const double v = rows_[static_cast<std::size_t>(i)][j] + pieces_[static_cast<std::size_t>(i)].a;
            if (v > v1) {
                v3 = v2; i3 = i2;
                v2 = v1; i2 = i1;
                v1 = v; i1 = i;
            } else if (v > v2) {
                v3 = v2; i3 = i2;
                v2 = v; i2 = i;
            } else if (v > v3) {
                v3 = v; i3 = i;
            }
        }
        val1_[j] = v1; val2_[j] = v2; val3_[j] = v3;
        idx1_[j] = i1; idx2_[j] = i2; idx3_[j] = i3;
    });
}

void MenuEvaluator::rebuild_node(std::int64_t j) {
    double v1 = -std::numeric_limits<double>::infinity(), v2 = v1, v3 = v1;
    int i1 = -1, i2 = -1, i3 = -1;
    for (int i = 0; i < piece_count(); ++i) {
        const double v = rows_[static_cast<std::size_t>(i)][j] + pieces_[static_cast<std::size_t>(i)].a;
        if (v > v1) {
            v3 = v2; i3 = i2;
            v2 = v1; i2 = i1;
            v1 = v; i1 = i;
        } else if (v > v2) {
            v3 = v2; i3 = i2;
            v2 = v; i2 = i;
        } else if (v > v3) {
            v3 = v; i3 = i;
        }
    }
    val1_[j] = v1; val2_[j] = v2; val3_[j] = v3;
    idx1_[j] = i1; idx2_[j] = i2; idx3_[j] = i3;
}

double MenuEvaluator::L_from_terms(const std::vector<double>& terms) const {
    return pairwise_sum(terms);
}

// The integrand c(Yu) - b(x,Yu) + u collapses to c(y_w) + a_w at the winning
// piece; benefit rows only decide the winner.
double MenuEvaluator::current_L() const {
    const std::int64_t n = spec_->x_grid.active_count();
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        const int w = idx1_[j];
        terms[static_cast<std::size_t>(j)] =
            fw_[j] * (cost_[static_cast<std::size_t>(w)] + pieces_[static_cast<std::size_t>(w)].a);
    }
    return L_from_terms(terms);
}

double MenuEvaluator::trial_L(int index, const Eigen::VectorXd& y, double a) const {
    const std::int64_t n = spec_->x_grid.active_count();
    Eigen::VectorXd row;
    spec_->benefit.eval_row(spec_->x_grid.nodes(), y, row);
    const double c_new = spec_->cost_c(y);
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        // best piece excluding `index`
        double bv;
        int bi;
        if (idx1_[j] != index) { bv = val1_[j]; bi = idx1_[j]; }
        else { bv = val2_[j]; bi = idx2_[j]; }
        const double v = row[j] + a;
        double term;
        if (v > bv || (v == bv && index < bi)) {
            term = c_new + a;
        } else {
            term = cost_[static_cast<std::size_t>(bi)] + pieces_[static_cast<std::size_t>(bi)].a;
        }
        terms[static_cast<std::size_t>(j)] = fw_[j] * term;
    }
    return L_from_terms(terms);
}

double MenuEvaluator::trial_add_L(const Eigen::VectorXd& y, double a) const {
    const std::int64_t n = spec_->x_grid.active_count();
    Eigen::VectorXd row;
    spec_->benefit.eval_row(spec_->x_grid.nodes(), y, row);
    const double c_new = spec_->cost_c(y);
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        const double v = row[j] + a;
        double term;
        if (v > val1_[j]) { // an added piece has the highest index; ties lose
            term = c_new + a;
        } else {
            const int w = idx1_[j];
            term = cost_[static_cast<std::size_t>(w)] + pieces_[static_cast<std::size_t>(w)].a;
        }
        terms[static_cast<std::size_t>(j)] = fw_[j] * term;
    }
    return L_from_terms(terms);
}

void MenuEvaluator::apply_move(int index, const Eigen::VectorXd& y, double a) {
    auto& piece = pieces_[static_cast<std::size_t>(index)];
    piece.y = y;
    piece.a = a;
    fill_piece_cache(index);
    const Eigen::VectorXd& row = rows_[static_cast<std::size_t>(index)];
    const std::int64_t n = spec_->x_grid.active_count();
    for (std::int64_t j = 0; j < n; ++j) {
        const double v = row[j] + a;
        const bool was_in_top3 = idx1_[j] == index || idx2_[j] == index || idx3_[j] == index;
        if (!was_in_top3) {
            // insert against a fully valid top-3
            if (v > val1_[j] || (v == val1_[j] && index < idx1_[j])) {
                val3_[j] = val2_[j]; idx3_[j] = idx2_[j];
                val2_[j] = val1_[j]; idx2_[j] = idx1_[j];
                val1_[j] = v; idx1_[j] = index;
            } else if (v > val2_[j] || (v == val2_[j] && index < idx2_[j])) {
                val3_[j] = val2_[j]; idx3_[j] = idx2_[j];
                val2_[j] = v; idx2_[j] = index;
            } else if (v > val3_[j] || (v == val3_[j] && index < idx3_[j])) {
                val3_[j] = v; idx3_[j] = index;
            }
            continue;
        }
        // removal exposes an unknown third entry; rebuilding the node keeps
        // the cached top-3 exact instead of letting staleness accumulate
        rebuild_node(j);
    }
}

void MenuEvaluator::remove_piece(int index) {
    if (index <= 0 || index >= piece_count())
        throw DomainError("cannot remove the null piece or an out-of-range piece");
    pieces_.erase(pieces_.begin() + index);
    rows_.erase(rows_.begin() + index);
    cost_.erase(cost_.begin() + index);
    rebuild_topk();
}

void MenuEvaluator::add_piece(const Eigen::VectorXd& y, double a) {
    BAffinePiece p;
    p.y = y;
    p.a = a;
    p.frozen = false;
    pieces_.push_back(std::move(p));
    rows_.emplace_back();
    cost_.push_back(0.0);
    fill_piece_cache(piece_count() - 1);
    rebuild_topk();
}

std::vector<std::int64_t> MenuEvaluator::winner_counts() const {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(piece_count()), 0);
    for (std::int64_t j = 0; j < spec_->x_grid.active_count(); ++j)
        ++counts[static_cast<std::size_t>(idx1_[j])];
    return counts;
}

double MenuEvaluator::max_gain(const Eigen::VectorXd& y) const {
    Eigen::VectorXd row;
    spec_->benefit.eval_row(spec_->x_grid.nodes(), y, row);
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t j = 0; j < spec_->x_grid.active_count(); ++j)
        best = std::max(best, row[j] - val1_[j]);
    return best;
}

BConvexFunction MenuEvaluator::menu() const {
    BConvexFunction u(spec_->benefit, pieces_.front());
    for (std::size_t i = 1; i < pieces_.size(); ++i) u.add_piece(pieces_[i]);
    return u;
}

double evaluate_L(const ProblemSpec& spec, const BConvexFunction& u) {
    return MenuEvaluator(spec, u).current_L();
}

} // namespace bconvex
