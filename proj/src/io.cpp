#include "bconvex/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bconvex {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open " + path + " for writing");
    out << contents;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string csv_header(int dim, const std::string& coord_prefix, const std::string& value_name) {
    std::string h;
    for (int d = 0; d < dim; ++d) h += coord_prefix + std::to_string(d + 1) + ",";
    h += value_name + "\n";
    return h;
}

} // namespace

void write_grid_csv(const std::string& path, const Grid& grid, const Eigen::VectorXd& values,
                    const std::string& coord_prefix, const std::string& value_name) {
    if (values.size() != grid.active_count())
        throw ConfigError("grid CSV write: value count does not match the grid");
    std::string out = csv_header(grid.dim(), coord_prefix, value_name);
    for (std::int64_t j = 0; j < grid.active_count(); ++j) {
        for (int d = 0; d < grid.dim(); ++d) out += format_double(grid.nodes()(j, d)) + ",";
        out += format_double(values[j]) + "\n";
    }
    write_text_file(path, out);
}

void write_assignment_csv(const std::string& path, const Grid& grid,
                          const std::vector<int>& winners, const std::string& coord_prefix) {
    if (static_cast<std::int64_t>(winners.size()) != grid.active_count())
        throw ConfigError("assignment CSV write: winner count does not match the grid");
    std::string out = csv_header(grid.dim(), coord_prefix, "winner");
    for (std::int64_t j = 0; j < grid.active_count(); ++j) {
        for (int d = 0; d < grid.dim(); ++d) out += format_double(grid.nodes()(j, d)) + ",";
        out += std::to_string(winners[static_cast<std::size_t>(j)]) + "\n";
    }
    write_text_file(path, out);
}

Eigen::VectorXd read_grid_csv(const std::string& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty CSV");
    Eigen::VectorXd values(grid.active_count());
    std::int64_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= grid.active_count()) throw ConfigError(path + ": more rows than grid nodes");
        const auto last_comma = line.find_last_of(',');
        if (last_comma == std::string::npos) throw ConfigError(path + ": malformed row");
        values[row++] = std::strtod(line.c_str() + last_comma + 1, nullptr);
    }
    if (row != grid.active_count())
        throw ConfigError(path + ": row count does not match the grid (" + std::to_string(row) +
                          " vs " + std::to_string(grid.active_count()) + ")");
    return values;
}

nlohmann::ordered_json menu_to_json(const BConvexFunction& u) {
    nlohmann::ordered_json pieces = nlohmann::ordered_json::array();
    for (const auto& p : u.pieces()) {
        nlohmann::ordered_json jp;
        jp["y"] = std::vector<double>(p.y.data(), p.y.data() + p.y.size());
        jp["a"] = p.a;
        jp["frozen"] = p.frozen;
        pieces.push_back(std::move(jp));
    }
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["pieces"] = std::move(pieces);
    return j;
}

BConvexFunction menu_from_json(const nlohmann::json& j, const BenefitFunction& b) {
    if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty())
        throw ConfigError("menu JSON: missing pieces");
    const auto read_piece = [&](const nlohmann::json& jp) {
        BAffinePiece p;
        const auto& y = jp.at("y");
        p.y.resize(static_cast<Eigen::Index>(y.size()));
        for (std::size_t d = 0; d < y.size(); ++d)
            p.y[static_cast<Eigen::Index>(d)] = y[d].get<double>();
        p.a = jp.at("a").get<double>();
        p.frozen = jp.value("frozen", false);
        return p;
    };
    const auto& pieces = j["pieces"];
    BConvexFunction u(b, read_piece(pieces[0]));
    for (std::size_t i = 1; i < pieces.size(); ++i) u.add_piece(read_piece(pieces[i]));
    return u;
}

} // namespace bconvex
