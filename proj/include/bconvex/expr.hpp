#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bconvex/errors.hpp"

namespace bconvex {

// Small arithmetic expression grammar for config-defined scalar fields:
//   +  -  *  /  ^  unary minus, parentheses,
//   functions exp, log, sqrt, pow(a,b), abs, min(a,b), max(a,b),
//   constant pi, and named coordinates (x1..xn, y1..yn).
// Variables are resolved to environment slots at parse time.
class Expr {
public:
    /// Parses `source`; `variables` maps names to env indices by position.
    static Expr parse(const std::string& source, const std::vector<std::string>& variables);

    double eval(const Eigen::VectorXd& env) const;

    const std::string& source() const { return source_; }

    Expr() = default;

private:
    struct Node;
    std::shared_ptr<const Node> root_;
    std::string source_;
};

} // namespace bconvex
