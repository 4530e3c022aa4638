#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bconvex/errors.hpp"

namespace bconvex {

struct Ball {
    Eigen::VectorXd center;
    double radius = 0.0;
};

/// Axis-aligned box, optionally intersected with a ball mask.
struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::optional<Ball> ball;

    int dim() const { return static_cast<int>(lower.size()); }

    bool contains(const Eigen::VectorXd& p, double tol = 1e-12) const;

    /// Ball center when masked, box midpoint otherwise.
    Eigen::VectorXd center() const;

    /// Box diagonal length.
    double diameter() const { return (upper - lower).norm(); }

    Eigen::VectorXd extent() const { return upper - lower; }

    /// Nearest point of the (masked) box.
    Eigen::VectorXd project(const Eigen::VectorXd& p) const;
};

/// Tensor lattice of cell centers over a box; ball masks drop nodes whose
/// center falls outside. Rows of nodes() enumerate active nodes only.
class Grid {
public:
    Grid() = default;
    Grid(Box domain, std::vector<int> counts);

    const Box& domain() const { return domain_; }
    const std::vector<int>& counts() const { return counts_; }
    int dim() const { return domain_.dim(); }

    const Eigen::VectorXd& spacing() const { return spacing_; }
    double cell_volume() const { return cell_volume_; }

    std::int64_t active_count() const { return nodes_.rows(); }
    /// Active node coordinates, one row per node.
    const Eigen::MatrixXd& nodes() const { return nodes_; }
    Eigen::VectorXd node(std::int64_t i) const { return nodes_.row(i).transpose(); }

    /// Active index of the axis neighbor (dir = +1/-1), or -1 when the
    /// neighbor is outside the lattice or masked away.
    std::int64_t neighbor(std::int64_t active_index, int axis, int dir) const;

private:
    Box domain_;
    std::vector<int> counts_;
    Eigen::VectorXd spacing_;
    double cell_volume_ = 0.0;
    Eigen::MatrixXd nodes_;
    std::vector<std::int64_t> active_flat_;    // flat lattice index per active node
    std::vector<std::int64_t> flat_to_active_; // -1 where masked
};

struct GridFunction {
    Grid grid;
    Eigen::VectorXd values; // one per active node

    GridFunction() = default;
    GridFunction(Grid g, Eigen::VectorXd v);
};

} // namespace bconvex
