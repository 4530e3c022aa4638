#pragma once

#include <Eigen/Dense>

#include "bconvex/benefit.hpp"
#include "bconvex/geometry.hpp"
#include "bconvex/menu.hpp"

namespace bconvex {

// Discrete b-transforms: exact sups over lattice nodes, no interpolation.
// This keeps envelope idempotence exact on the lattice.

/// v(y_j) = max_i [ b(x_i, y_j) - u_i ] for rows x_i of x_pts, y_j of y_pts.
Eigen::VectorXd sup_transform_to_y(const BenefitFunction& b, const Eigen::MatrixXd& y_pts,
                                   const Eigen::MatrixXd& x_pts, const Eigen::VectorXd& u);

/// u(x_i) = max_j [ b(x_i, y_j) - v_j ].
Eigen::VectorXd sup_transform_to_x(const BenefitFunction& b, const Eigen::MatrixXd& x_pts,
                                   const Eigen::MatrixXd& y_pts, const Eigen::VectorXd& v);

/// Price menu of a grid utility: v(y) = max_x b(x,y) - u(x).
GridFunction b_transform_v(const BenefitFunction& b, const GridFunction& u, const Grid& y_grid);

/// Utility of a grid price menu: u(x) = max_y b(x,y) - v(y).
GridFunction b_transform_u(const BenefitFunction& b, const GridFunction& v, const Grid& x_grid);

/// Discrete b-convex envelope: b_transform_u(b_transform_v(u)). Idempotent on
/// the lattice and a pointwise contraction (envelope <= u).
GridFunction bconvex_envelope(const BenefitFunction& b, const GridFunction& u, const Grid& y_grid);

/// Samples a menu utility onto a grid.
GridFunction sample_to_grid(const BConvexFunction& u, const Grid& x_grid);

} // namespace bconvex
