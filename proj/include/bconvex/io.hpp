#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bconvex/geometry.hpp"
#include "bconvex/menu.hpp"

namespace bconvex {

// CSV columns are printed with 17 significant digits (lossless round trip).

void write_grid_csv(const std::string& path, const Grid& grid, const Eigen::VectorXd& values,
                    const std::string& coord_prefix, const std::string& value_name);

void write_assignment_csv(const std::string& path, const Grid& grid,
                          const std::vector<int>& winners, const std::string& coord_prefix);

/// Reads the value column of a grid CSV written by write_grid_csv; validates
/// the row count against the grid.
Eigen::VectorXd read_grid_csv(const std::string& path, const Grid& grid);

nlohmann::ordered_json menu_to_json(const BConvexFunction& u);
BConvexFunction menu_from_json(const nlohmann::json& j, const BenefitFunction& b);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

std::string format_double(double v); // %.17g

} // namespace bconvex
