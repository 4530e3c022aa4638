#include "bconvex/gridops.hpp"

#include <limits>

namespace bconvex {

// Exact sups over lattice nodes, candidate-major so the running max over the
// output points is vectorized. Candidate order is fixed, so results are
// deterministic.

Eigen::VectorXd sup_transform_to_y(const BenefitFunction& b, const Eigen::MatrixXd& y_pts,
                                   const Eigen::MatrixXd& x_pts, const Eigen::VectorXd& u) {
    const std::int64_t n_y = y_pts.rows();
    Eigen::VectorXd best = Eigen::VectorXd::Constant(n_y, -std::numeric_limits<double>::infinity());
    Eigen::VectorXd row(n_y);
    for (std::int64_t j = 0; j < x_pts.rows(); ++j) {
        b.eval_col(x_pts.row(j).transpose(), y_pts, row);
        best = best.cwiseMax(row.array() - u[j]).matrix();
    }
    return best;
}

Eigen::VectorXd sup_transform_to_x(const BenefitFunction& b, const Eigen::MatrixXd& x_pts,
                                   const Eigen::MatrixXd& y_pts, const Eigen::VectorXd& v) {
    const std::int64_t n_x = x_pts.rows();
    Eigen::VectorXd best = Eigen::VectorXd::Constant(n_x, -std::numeric_limits<double>::infinity());
    Eigen::VectorXd row(n_x);
    for (std::int64_t j = 0; j < y_pts.rows(); ++j) {
        b.eval_row(x_pts, y_pts.row(j).transpose(), row);
        best = best.cwiseMax(row.array() - v[j]).matrix();
    }
    return best;
}

GridFunction b_transform_v(const BenefitFunction& b, const GridFunction& u, const Grid& y_grid) {
    return GridFunction(y_grid, sup_transform_to_y(b, y_grid.nodes(), u.grid.nodes(), u.values));
}

GridFunction b_transform_u(const BenefitFunction& b, const GridFunction& v, const Grid& x_grid) {
    return GridFunction(x_grid, sup_transform_to_x(b, x_grid.nodes(), v.grid.nodes(), v.values));
}

GridFunction bconvex_envelope(const BenefitFunction& b, const GridFunction& u, const Grid& y_grid) {
    return b_transform_u(b, b_transform_v(b, u, y_grid), u.grid);
}

GridFunction sample_to_grid(const BConvexFunction& u, const Grid& x_grid) {
    Eigen::VectorXd best =
        Eigen::VectorXd::Constant(x_grid.active_count(), -std::numeric_limits<double>::infinity());
    Eigen::VectorXd row(x_grid.active_count());
    for (const auto& p : u.pieces()) {
        u.benefit().eval_row(x_grid.nodes(), p.y, row);
        best = best.cwiseMax(row.array() + p.a).matrix();
    }
    return GridFunction(x_grid, best);
}

} // namespace bconvex
