#include "bconvex/geometry.hpp"

#include <cmath>

namespace bconvex {

bool Box::contains(const Eigen::VectorXd& p, double tol) const {
    if (p.size() != lower.size()) return false;
    for (int d = 0; d < dim(); ++d) {
        if (p[d] < lower[d] - tol || p[d] > upper[d] + tol) return false;
    }
    if (ball) {
        if ((p - ball->center).norm() > ball->radius + tol) return false;
    }
    return true;
}

Eigen::VectorXd Box::center() const {
    if (ball) return ball->center;
    return 0.5 * (lower + upper);
}

Eigen::VectorXd Box::project(const Eigen::VectorXd& p) const {
    Eigen::VectorXd q = p.cwiseMax(lower).cwiseMin(upper);
    if (ball) {
        const Eigen::VectorXd d = q - ball->center;
        const double n = d.norm();
        if (n > ball->radius && n > 0.0) {
            q = ball->center + d * (ball->radius / n);
            q = q.cwiseMax(lower).cwiseMin(upper);
        }
    }
    return q;
}

Grid::Grid(Box domain, std::vector<int> counts)
    : domain_(std::move(domain)), counts_(std::move(counts)) {
    const int n = domain_.dim();
    if (static_cast<int>(counts_.size()) != n)
        throw DomainError("grid counts do not match the domain dimension");
    spacing_.resize(n);
    std::int64_t total = 1;
    for (int d = 0; d < n; ++d) {
        if (counts_[d] <= 0) throw DomainError("grid counts must be positive");
        spacing_[d] = (domain_.upper[d] - domain_.lower[d]) / counts_[d];
        total *= counts_[d];
    }
    cell_volume_ = spacing_.prod();

    // Cell centers; ball masks keep nodes whose center is inside.
    std::vector<std::int64_t> active;
    active.reserve(total);
    Eigen::VectorXd p(n);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        std::int64_t rem = flat;
        for (int d = 0; d < n; ++d) {
            const std::int64_t i = rem % counts_[d];
            rem /= counts_[d];
            p[d] = domain_.lower[d] + (static_cast<double>(i) + 0.5) * spacing_[d];
        }
        if (!domain_.ball || (p - domain_.ball->center).norm() <= domain_.ball->radius)
            active.push_back(flat);
    }
    nodes_.resize(static_cast<std::int64_t>(active.size()), n);
    flat_to_active_.assign(static_cast<std::size_t>(total), -1);
    for (std::size_t k = 0; k < active.size(); ++k) {
        flat_to_active_[static_cast<std::size_t>(active[k])] = static_cast<std::int64_t>(k);
        std::int64_t rem = active[k];
        for (int d = 0; d < n; ++d) {
            const std::int64_t i = rem % counts_[d];
            rem /= counts_[d];
            nodes_(static_cast<std::int64_t>(k), d) =
                domain_.lower[d] + (static_cast<double>(i) + 0.5) * spacing_[d];
        }
    }
    active_flat_ = std::move(active);
}

std::int64_t Grid::neighbor(std::int64_t active_index, int axis, int dir) const {
    std::int64_t flat = active_flat_[static_cast<std::size_t>(active_index)];
    std::int64_t stride = 1;
    for (int d = 0; d < axis; ++d) stride *= counts_[d];
    const std::int64_t i = (flat / stride) % counts_[axis];
    const std::int64_t j = i + dir;
    if (j < 0 || j >= counts_[axis]) return -1;
    return flat_to_active_[static_cast<std::size_t>(flat + dir * stride)];
}

GridFunction::GridFunction(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.active_count())
        throw DomainError("grid function values do not match the active node count");
}

} // namespace bconvex
