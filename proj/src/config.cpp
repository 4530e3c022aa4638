#include "bconvex/config.hpp"

#include <algorithm>
#include <set>

#include "bconvex/io.hpp"

namespace bconvex {

namespace {

void require_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown config key \"" + where + "." + item.key() + "\"");
    }
    for (const auto& key : required) {
        if (!j.contains(key)) throw ConfigError("missing config key \"" + where + "." + key + "\"");
    }
}

Eigen::VectorXd read_vector(const nlohmann::json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ConfigError("\"" + where + "\" must be an array of " + std::to_string(dim) +
                          " numbers");
    Eigen::VectorXd v(dim);
    for (int d = 0; d < dim; ++d) v[d] = j[static_cast<std::size_t>(d)].get<double>();
    return v;
}

Box read_box(const nlohmann::json& j, int dim, const std::string& where) {
    require_keys(j, {"lower", "upper", "ball"}, {"lower", "upper"}, where);
    Box box;
    box.lower = read_vector(j.at("lower"), dim, where + ".lower");
    box.upper = read_vector(j.at("upper"), dim, where + ".upper");
    for (int d = 0; d < dim; ++d)
        if (!(box.lower[d] < box.upper[d]))
            throw ConfigError("\"" + where + "\" has empty extent on axis " + std::to_string(d + 1));
    if (j.contains("ball")) {
        require_keys(j.at("ball"), {"center", "radius"}, {"center", "radius"}, where + ".ball");
        Ball ball;
        ball.center = read_vector(j.at("ball").at("center"), dim, where + ".ball.center");
        ball.radius = j.at("ball").at("radius").get<double>();
        if (!(ball.radius > 0.0)) throw ConfigError("\"" + where + ".ball.radius\" must be positive");
        box.ball = std::move(ball);
    }
    return box;
}

std::vector<int> read_counts(const nlohmann::json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ConfigError("\"" + where + "\" must be an array of " + std::to_string(dim) +
                          " node counts");
    std::vector<int> counts(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d) {
        counts[static_cast<std::size_t>(d)] = j[static_cast<std::size_t>(d)].get<int>();
        if (counts[static_cast<std::size_t>(d)] < 2)
            throw ConfigError("\"" + where + "\" entries must be at least 2");
    }
    return counts;
}

std::vector<std::string> axis_names(const std::string& prefix, int dim) {
    std::vector<std::string> names;
    for (int d = 0; d < dim; ++d) names.push_back(prefix + std::to_string(d + 1));
    return names;
}

} // namespace

ProblemSpec parse_problem_config(const nlohmann::json& j) {
    require_keys(j,
                 {"schema_version", "dim", "benefit", "x_domain", "y_domain", "x_grid", "y_grid",
                  "density_f", "lambda", "cost_c", "null_product", "menu_size", "seed", "solver"},
                 {"schema_version", "dim", "benefit", "x_domain", "y_domain", "x_grid", "density_f",
                  "lambda", "cost_c", "null_product", "menu_size", "seed"},
                 "config");
    if (j.at("schema_version").get<int>() != 1)
        throw ConfigError("unsupported schema_version (expected 1)");

    const int dim = j.at("dim").get<int>();
    if (dim < 1 || dim > 8) throw ConfigError("dim must be between 1 and 8");

    const Box x_domain = read_box(j.at("x_domain"), dim, "x_domain");
    const Box y_domain = read_box(j.at("y_domain"), dim, "y_domain");

    const auto& jb = j.at("benefit");
    require_keys(jb, {"family", "expr", "fd_step"}, {"family"}, "benefit");
    const std::string family = jb.at("family").get<std::string>();
    const double fd_step = jb.value("fd_step", 1e-4);

    BenefitFunction benefit = [&] {
        if (family == "bilinear") return BenefitFunction::bilinear(x_domain, y_domain);
        if (family == "quadratic_distance")
            return BenefitFunction::quadratic_distance(x_domain, y_domain);
        if (family == "user") {
            if (!jb.contains("expr"))
                throw ConfigError("benefit.family \"user\" requires \"benefit.expr\"");
            return BenefitFunction::user_defined(jb.at("expr").get<std::string>(), x_domain,
                                                 y_domain, fd_step);
        }
        throw ConfigError("unknown benefit.family \"" + family +
                          "\" (bilinear | quadratic_distance | user)");
    }();

    ProblemSpec spec{std::move(benefit),
                     Grid(x_domain, read_counts(j.at("x_grid"), dim, "x_grid")),
                     Grid(),
                     {},
                     0.0,
                     {},
                     Eigen::VectorXd(),
                     0.0,
                     0,
                     0,
                     {}};

    std::vector<int> y_counts(static_cast<std::size_t>(dim), 33);
    if (j.contains("y_grid")) y_counts = read_counts(j.at("y_grid"), dim, "y_grid");
    spec.y_grid = Grid(y_domain, y_counts);

    spec.lambda = j.at("lambda").get<double>();
    if (!(spec.lambda > 0.0)) throw ConfigError("lambda must be positive");

    const Expr f_expr = Expr::parse(j.at("density_f").get<std::string>(), axis_names("x", dim));
    spec.density_f = [f_expr](const Eigen::VectorXd& x) { return f_expr.eval(x); };
    const Expr c_expr = Expr::parse(j.at("cost_c").get<std::string>(), axis_names("y", dim));
    spec.cost_c = [c_expr](const Eigen::VectorXd& y) { return c_expr.eval(y); };

    // density lower bound, sampled on the quadrature grid
    for (std::int64_t k = 0; k < spec.x_grid.active_count(); ++k) {
        const double f = spec.density_f(spec.x_grid.node(k));
        if (!(f >= spec.lambda - 1e-12))
            throw ConfigError("density_f drops below lambda at a grid node (f=" +
                              std::to_string(f) + ")");
    }

    const auto& jn = j.at("null_product");
    require_keys(jn, {"y", "a"}, {"y", "a"}, "null_product");
    spec.y_null = read_vector(jn.at("y"), dim, "null_product.y");
    spec.a_null = jn.at("a").get<double>();
    if (!y_domain.contains(spec.y_null, 1e-9))
        throw ConfigError("null_product.y lies outside y_domain");

    spec.menu_size = j.at("menu_size").get<int>();
    if (spec.menu_size < 1) throw ConfigError("menu_size must be at least 1");
    spec.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("solver")) {
        const auto& js = j.at("solver");
        require_keys(js,
                     {"rel_decrease_tol", "max_outer_iters", "fd_param_step_rel", "grad_tol",
                      "multi_start", "split_period", "prune_after", "min_iters", "patience",
                      "init_step_rel", "audit_h_max", "audit_trials", "audit_tol"},
                     {}, "solver");
        auto& o = spec.opts;
        o.rel_decrease_tol = js.value("rel_decrease_tol", o.rel_decrease_tol);
        o.max_outer_iters = js.value("max_outer_iters", o.max_outer_iters);
        o.fd_param_step_rel = js.value("fd_param_step_rel", o.fd_param_step_rel);
        o.grad_tol = js.value("grad_tol", o.grad_tol);
        o.multi_start = js.value("multi_start", o.multi_start);
        o.split_period = js.value("split_period", o.split_period);
        o.prune_after = js.value("prune_after", o.prune_after);
        o.min_iters = js.value("min_iters", o.min_iters);
        o.patience = js.value("patience", o.patience);
        o.init_step_rel = js.value("init_step_rel", o.init_step_rel);
        o.audit_h_max = js.value("audit_h_max", o.audit_h_max);
        o.audit_trials = js.value("audit_trials", o.audit_trials);
        o.audit_tol = js.value("audit_tol", o.audit_tol);
    }
    return spec;
}

ProblemSpec load_problem_config(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_problem_config(j);
}

nlohmann::ordered_json config_echo(const nlohmann::json& j) {
    const ProblemSpec spec = parse_problem_config(j); // validates
    nlohmann::ordered_json echo;
    echo["schema_version"] = 1;
    echo["dim"] = j.at("dim").get<int>();
    {
        nlohmann::ordered_json jb;
        jb["family"] = j.at("benefit").at("family").get<std::string>();
        if (j.at("benefit").contains("expr")) jb["expr"] = j.at("benefit").at("expr");
        jb["fd_step"] = j.at("benefit").value("fd_step", 1e-4);
        echo["benefit"] = std::move(jb);
    }
    const auto echo_box = [&](const nlohmann::json& src) {
        nlohmann::ordered_json b;
        b["lower"] = src.at("lower");
        b["upper"] = src.at("upper");
        if (src.contains("ball")) {
            nlohmann::ordered_json ball;
            ball["center"] = src.at("ball").at("center");
            ball["radius"] = src.at("ball").at("radius");
            b["ball"] = std::move(ball);
        }
        return b;
    };
    echo["x_domain"] = echo_box(j.at("x_domain"));
    echo["y_domain"] = echo_box(j.at("y_domain"));
    echo["x_grid"] = j.at("x_grid");
    echo["y_grid"] = nlohmann::json(spec.y_grid.counts());
    echo["density_f"] = j.at("density_f");
    echo["lambda"] = j.at("lambda");
    echo["cost_c"] = j.at("cost_c");
    {
        nlohmann::ordered_json jn;
        jn["y"] = j.at("null_product").at("y");
        jn["a"] = j.at("null_product").at("a");
        echo["null_product"] = std::move(jn);
    }
    echo["menu_size"] = spec.menu_size;
    echo["seed"] = spec.seed;
    {
        const auto& o = spec.opts;
        nlohmann::ordered_json js;
        js["rel_decrease_tol"] = o.rel_decrease_tol;
        js["max_outer_iters"] = o.max_outer_iters;
        js["fd_param_step_rel"] = o.fd_param_step_rel;
        js["grad_tol"] = o.grad_tol;
        js["multi_start"] = o.multi_start;
        js["split_period"] = o.split_period;
        js["prune_after"] = o.prune_after;
        js["min_iters"] = o.min_iters;
        js["patience"] = o.patience;
        js["init_step_rel"] = o.init_step_rel;
        js["audit_h_max"] = o.audit_h_max;
        js["audit_trials"] = o.audit_trials;
        js["audit_tol"] = o.audit_tol;
        echo["solver"] = std::move(js);
    }
    return echo;
}

} // namespace bconvex
