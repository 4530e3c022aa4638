#include "bconvex/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "bconvex/numerics.hpp"
#include "bconvex/rng.hpp"

namespace bconvex {

namespace {

// Orthogonal map sending the unit vector a to e1 (Householder reflection).
Eigen::MatrixXd rotation_to_e1(const Eigen::VectorXd& a) {
    const int n = static_cast<int>(a.size());
    Eigen::VectorXd v = a;
    v[0] -= 1.0;
    const double s = v.squaredNorm();
    if (s < 1e-28) return Eigen::MatrixXd::Identity(n, n);
    return Eigen::MatrixXd::Identity(n, n) - (2.0 / s) * (v * v.transpose());
}

} // namespace

RegularityLab::RegularityLab(const ProblemSpec& spec, const BConvexFunction& u)
    : spec_(&spec), u_(&u), eval_(spec, u) {}

std::vector<Eigen::VectorXd> RegularityLab::sphere_directions() const {
    const int n = spec_->dim();
    std::vector<Eigen::VectorXd> dirs;
    if (n == 1) {
        Eigen::VectorXd plus(1), minus(1);
        plus[0] = 1.0;
        minus[0] = -1.0;
        dirs = {plus, minus};
    } else if (n == 2) {
        dirs.reserve(64);
        for (int k = 0; k < 64; ++k) {
            const double theta = kTwoPi * k / 64.0;
            Eigen::VectorXd d(2);
            d << std::cos(theta), std::sin(theta);
            dirs.push_back(d);
        }
    } else {
        // Fibonacci lattice on the sphere (n = 3); higher dimensions get a
        // deterministic normalized Halton set.
        const int m = 128;
        dirs.reserve(m);
        if (n == 3) {
            const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
            for (int k = 0; k < m; ++k) {
                const double z = 1.0 - 2.0 * (k + 0.5) / m;
                const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double phi = kTwoPi * k / golden;
                Eigen::VectorXd d(3);
                d << rho * std::cos(phi), rho * std::sin(phi), z;
                dirs.push_back(d);
            }
        } else {
            Rng rng(12345);
            for (int k = 0; k < m; ++k) dirs.push_back(rng.unit_vector(n));
        }
    }
    return dirs;
}

GapResult RegularityLab::support_gap(const Eigen::VectorXd& x0, double r) const {
    const BenefitFunction& b = spec_->benefit;
    const BAffinePiece support = u_->support_at(x0);
    GapResult result;
    result.h = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& dir : sphere_directions()) {
        const Eigen::VectorXd xs = x0 + r * dir;
        if (!b.x_domain().contains(xs, 1e-12))
            throw DomainError("support_gap ball pokes outside the consumer domain");
        const double gap = u_->eval(xs) - (b.eval(xs, support.y) + support.a);
        if (gap > best) {
            best = gap;
            result.direction = dir;
            result.x_max = xs;
        }
    }
    result.h = std::max(best, 0.0);
    return result;
}

ScanResult RegularityLab::c11_scan(const std::vector<Eigen::VectorXd>& x0s,
                                   const std::vector<double>& rs) const {
    ScanResult scan;
    for (const auto& x0 : x0s) {
        for (const double r : rs) {
            const GapResult gap = support_gap(x0, r);
            ScanRow row;
            row.x0 = x0;
            row.r = r;
            row.h = gap.h;
            row.ratio = gap.h / (r * r);
            scan.max_ratio = std::max(scan.max_ratio, row.ratio);
            scan.rows.push_back(std::move(row));
        }
    }
    return scan;
}

TrialReport RegularityLab::trial_function(const Eigen::VectorXd& x0, double r) const {
    const BenefitFunction& b = spec_->benefit;
    const int n = spec_->dim();

    const BAffinePiece support = u_->support_at(x0);
    const GapResult gap = support_gap(x0, r);
    if (!(gap.h > 0.0)) throw HNonPositive("trial_function requires a positive support gap");

    TrialReport report;
    report.x0 = x0;
    report.r = r;
    report.h = gap.h;
    report.ratio = gap.h / (r * r);

    // Tilde chart at the support anchor, rotated so the maximizer sits on e1.
    const TildeChart chart(b, x0, support.y);
    const Eigen::VectorXd tx_max = chart.to_tilde_x(gap.x_max);
    const double r_tilde = tx_max.norm();
    if (r_tilde < 1e-14) throw DomainError("degenerate chart: gap maximizer maps to the origin");
    const Eigen::MatrixXd R = rotation_to_e1(tx_max / r_tilde);

    const Eigen::MatrixXd cross = b.cross_hessian(gap.x_max, support.y);
    const Eigen::VectorXd y1 = u_->assigned_product(gap.x_max);
    const Eigen::VectorXd dmom = b.grad_x(gap.x_max, y1) - b.grad_x(gap.x_max, support.y);
    report.kappa = (R * cross.partialPivLu().solve(dmom))(0);

    // y*: momentum (h/2r) e1 in the rotated tilde frame, pulled back.
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n);
    e1[0] = 1.0;
    const Eigen::VectorXd momentum =
        b.grad_x(gap.x_max, support.y) + (gap.h / (2.0 * r_tilde)) * (cross * (R.transpose() * e1));
    const Eigen::VectorXd y_star = b.invert_Y(gap.x_max, momentum); // NoPreimage propagates
    report.y_star = y_star;

    const double a_star = u_->eval(gap.x_max) - b.eval(gap.x_max, y_star);

    // Section S = { u < p* } on the quadrature grid.
    const Grid& grid = spec_->x_grid;
    Eigen::VectorXd row;
    b.eval_row(grid.nodes(), y_star, row);
    double worst_excess = -std::numeric_limits<double>::infinity();
    double slab_min = std::numeric_limits<double>::infinity();
    double slab_max = -std::numeric_limits<double>::infinity();
    std::vector<double> lhs_terms;
    std::int64_t count = 0;
    for (std::int64_t j = 0; j < grid.active_count(); ++j) {
        const double p_val = row[j] + a_star;
        const double u_val = eval_.u_value(j);
        if (!(u_val < p_val)) continue;
        ++count;
        worst_excess = std::max(worst_excess, p_val - u_val);
        const Eigen::VectorXd node = grid.node(j);
        const double x1 = (R * chart.to_tilde_x(node))(0);
        slab_min = std::min(slab_min, x1);
        slab_max = std::max(slab_max, x1);
        const int w = eval_.winner(j);
        const double b_star = row[j];
        const double b_w = u_val - u_->pieces()[static_cast<std::size_t>(w)].a;
        const double integrand =
            (spec_->cost_c(y_star) - b_star) - (eval_.piece_cost(w) - b_w);
        lhs_terms.push_back(integrand * spec_->density_f(node));
    }
    report.section_nodes = count;
    report.section_mass = static_cast<double>(count) * grid.cell_volume();
    if (count > 0) {
        report.height_defect = worst_excess - gap.h;
        report.slab_width_over_r = (slab_max - slab_min) / r;
        report.energy_lhs = pairwise_sum(lhs_terms) / static_cast<double>(count);
    } else {
        report.height_defect = -gap.h;
        report.slab_width_over_r = 0.0;
        report.energy_lhs = 0.0;
    }
    report.energy_margin = eval_.trial_add_L(y_star, a_star) - eval_.current_L();
    return report;
}

BilinearTrialReport RegularityLab::bilinear_trial(const Eigen::VectorXd& x0, double r) const {
    const BenefitFunction& b = spec_->benefit;
    if (b.family() != BenefitFamily::Bilinear)
        throw FamilyError("bilinear_trial requires the bilinear benefit family");
    const int n = spec_->dim();

    const BAffinePiece support = u_->support_at(x0);
    const GapResult gap = support_gap(x0, r);
    if (!(gap.h > 0.0)) throw HNonPositive("bilinear_trial requires a positive support gap");

    const Eigen::MatrixXd R = rotation_to_e1(gap.direction);
    const Grid& grid = spec_->x_grid;
    const std::int64_t N = grid.active_count();

    // w = u - support >= 0; sigma = (h/2r)(x^1 + r) in the rotated frame.
    Eigen::VectorXd support_row;
    b.eval_row(grid.nodes(), support.y, support_row);
    Eigen::VectorXd w(N), sigma(N);
    std::vector<char> in_section(static_cast<std::size_t>(N), 0);
    const double slope = gap.h / (2.0 * r);
    BilinearTrialReport report;
    report.h = gap.h;
    double containment = -std::numeric_limits<double>::infinity();
    std::int64_t count = 0;
    std::vector<double> upper_terms;
    for (std::int64_t j = 0; j < N; ++j) {
        w[j] = eval_.u_value(j) - (support_row[j] + support.a);
        const double x1 = (R * (grid.node(j) - x0))(0);
        sigma[j] = slope * (x1 + r);
        if (sigma[j] > w[j]) {
            in_section[static_cast<std::size_t>(j)] = 1;
            ++count;
            containment = std::max(containment, std::abs(x1) - r);
            upper_terms.push_back(sigma[j] - w[j]);
        }
    }
    report.section_nodes = count;
    report.section_mass = static_cast<double>(count) * grid.cell_volume();
    report.containment_defect = count > 0 ? containment : 0.0;
    report.upper_bound_rhs =
        (n + 1) * pairwise_sum(upper_terms) * grid.cell_volume();

    // Gradient proxy on interior section nodes, central differences of w.
    const Eigen::VectorXd dsigma = slope * (R.transpose() * Eigen::VectorXd::Unit(n, 0));
    std::vector<double> grad_terms;
    for (std::int64_t j = 0; j < N; ++j) {
        if (!in_section[static_cast<std::size_t>(j)]) continue;
        Eigen::VectorXd dw(n);
        bool interior = true;
        for (int d = 0; d < n; ++d) {
            const std::int64_t jp = grid.neighbor(j, d, +1);
            const std::int64_t jm = grid.neighbor(j, d, -1);
            if (jp < 0 || jm < 0) {
                interior = false;
                break;
            }
            dw[d] = (w[jp] - w[jm]) / (2.0 * grid.spacing()[d]);
        }
        if (!interior) continue;
        grad_terms.push_back((dw - dsigma).squaredNorm());
    }
    report.grad_sq_integral = pairwise_sum(grad_terms) * grid.cell_volume();
    report.jensen_rhs = (gap.h * gap.h) / (r * r) * report.section_mass;
    return report;
}

KinkReport RegularityLab::kink_scan(const KinkOptions& options) const {
    const Grid& grid = spec_->x_grid;
    const int n = spec_->dim();

    // 1D profile of u along the grid line (1D) or a ray from the domain
    // center (2D+), with the winning piece at each sample.
    std::vector<double> s_values;
    std::vector<Eigen::VectorXd> points;
    double s_min = 0.0, s_max = 0.0;
    std::function<Eigen::VectorXd(double)> at;
    if (n == 1) {
        s_min = grid.node(0)[0];
        s_max = grid.node(grid.active_count() - 1)[0];
        at = [](double s) {
            Eigen::VectorXd p(1);
            p[0] = s;
            return p;
        };
        for (std::int64_t j = 0; j < grid.active_count(); ++j) s_values.push_back(grid.node(j)[0]);
    } else {
        const Eigen::VectorXd center = grid.domain().center();
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
        dir[options.direction_axis] = 1.0;
        const double step = 0.5 * grid.spacing().minCoeff();
        at = [center, dir](double s) { return (center + s * dir).eval(); };
        double s = 0.0;
        while (grid.domain().contains(at(s + step), -0.5 * step)) s += step;
        s_min = 0.0;
        s_max = s;
        for (double t = 0.0; t <= s; t += step) s_values.push_back(t);
    }
    if (s_values.size() < 8) throw NoBoundary("profile too short to scan");

    std::int64_t boundary_idx = -1;
    for (std::size_t k = 0; k < s_values.size(); ++k) {
        if (u_->winner_index(at(s_values[k])) != 0) {
            boundary_idx = static_cast<std::int64_t>(k);
            break;
        }
    }
    if (boundary_idx < 0) throw NoBoundary("assignment is null everywhere along the profile");
    if (boundary_idx == 0) throw NoBoundary("assignment is never null along the profile");

    KinkReport report;
    report.boundary_node = boundary_idx;
    report.boundary = s_values[static_cast<std::size_t>(boundary_idx)];

    const double sample_step = s_values[1] - s_values[0];
    const double margin = 2.0 * sample_step;
    const double H_req = options.probe_step_frac * (s_max - s_min);
    const int phases = std::max(1, options.phase_count);
    const double phase_span_factor = 2.0 + static_cast<double>(phases - 1) / 16.0;

    const auto one_sided = [&](double anchor, int side) {
        // side=-1 probes down from the anchor, side=+1 up
        const double room = side < 0 ? anchor - s_min : s_max - anchor;
        const double H = std::min(H_req, 0.95 * room / phase_span_factor);
        if (H <= 4.0 * sample_step)
            throw NoBoundary("not enough room for one-sided second differences");
        std::vector<double> d2s;
        for (int m = 0; m < phases; ++m) {
            const double o = static_cast<double>(m) * H / 16.0;
            const double s0 = anchor + side * o;
            const double g0 = u_->eval(at(s0));
            const double g1 = u_->eval(at(s0 + side * H));
            const double g2 = u_->eval(at(s0 + side * 2.0 * H));
            d2s.push_back((g0 - 2.0 * g1 + g2) / (H * H));
        }
        return pairwise_sum(d2s) / static_cast<double>(d2s.size());
    };

    report.left_second_diff = one_sided(report.boundary - margin, -1);
    report.right_second_diff = one_sided(report.boundary + margin, +1);
    report.jump = report.right_second_diff - report.left_second_diff;
    return report;
}

} // namespace bconvex
