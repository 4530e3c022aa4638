#include "bconvex/benefit.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bconvex/parallel.hpp"

namespace bconvex {

namespace {

std::vector<std::string> benefit_variables(int n) {
    std::vector<std::string> vars;
    vars.reserve(2 * static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) vars.push_back("x" + std::to_string(d + 1));
    for (int d = 0; d < n; ++d) vars.push_back("y" + std::to_string(d + 1));
    return vars;
}

std::string point_str(const Eigen::VectorXd& p) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
    os << ")";
    return os.str();
}

} // namespace

BenefitFunction BenefitFunction::bilinear(Box x_domain, Box y_domain) {
    BenefitFunction b;
    b.family_ = BenefitFamily::Bilinear;
    b.x_domain_ = std::move(x_domain);
    b.y_domain_ = std::move(y_domain);
    b.validate();
    return b;
}

BenefitFunction BenefitFunction::quadratic_distance(Box x_domain, Box y_domain) {
    BenefitFunction b;
    b.family_ = BenefitFamily::QuadraticDistance;
    b.x_domain_ = std::move(x_domain);
    b.y_domain_ = std::move(y_domain);
    b.validate();
    return b;
}

BenefitFunction BenefitFunction::user_defined(const std::string& expression, Box x_domain,
                                              Box y_domain, double fd_step) {
    BenefitFunction b;
    b.family_ = BenefitFamily::UserDefined;
    b.x_domain_ = std::move(x_domain);
    b.y_domain_ = std::move(y_domain);
    b.fd_step_ = fd_step;
    b.expr_ = Expr::parse(expression, benefit_variables(b.x_domain_.dim()));
    b.validate();
    return b;
}

void BenefitFunction::validate() const {
    if (x_domain_.dim() != y_domain_.dim())
        throw DomainError("consumer and product domains must share a dimension");
    if (fd_step_ <= 0.0) throw DomainError("fd_step must be positive");

    // Sampled finiteness and cross-derivative nondegeneracy (B1 witness).
    constexpr double det_floor = 1e-8;
    const int n = dim();
    const int per_axis = 3;
    std::vector<Eigen::VectorXd> xs, ys;
    const auto lattice = [&](const Box& box, std::vector<Eigen::VectorXd>& out) {
        const std::int64_t total = static_cast<std::int64_t>(std::pow(per_axis, n));
        for (std::int64_t flat = 0; flat < total; ++flat) {
            std::int64_t rem = flat;
            Eigen::VectorXd p(n);
            for (int d = 0; d < n; ++d) {
                const int i = static_cast<int>(rem % per_axis);
                rem /= per_axis;
                p[d] = box.lower[d] + (box.upper[d] - box.lower[d]) * (0.5 + i) / per_axis;
            }
            out.push_back(box.project(p));
        }
    };
    lattice(x_domain_, xs);
    lattice(y_domain_, ys);
    for (const auto& x : xs) {
        for (const auto& y : ys) {
            const double v = eval_raw(x, y);
            if (!std::isfinite(v))
                throw DomainError("benefit is not finite at x=" + point_str(x) + ", y=" + point_str(y));
            const double det = cross_hessian(x, y).determinant();
            if (std::abs(det) < det_floor)
                throw DomainError("cross-derivative matrix is degenerate (|det|=" +
                                  std::to_string(std::abs(det)) + ") at x=" + point_str(x) +
                                  ", y=" + point_str(y));
        }
    }
}

double BenefitFunction::eval_raw(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    switch (family_) {
        case BenefitFamily::Bilinear: return x.dot(y);
        case BenefitFamily::QuadraticDistance: return -0.5 * (x - y).squaredNorm();
        case BenefitFamily::UserDefined: {
            Eigen::VectorXd env(x.size() + y.size());
            env << x, y;
            return expr_.eval(env);
        }
    }
    return 0.0;
}

double BenefitFunction::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    if (!x_domain_.contains(x, 1e-9) || !y_domain_.contains(y, 1e-9))
        throw DomainError("benefit evaluated outside the closed product domain at x=" +
                          point_str(x) + ", y=" + point_str(y));
    return eval_raw(x, y);
}

void BenefitFunction::eval_row(const Eigen::MatrixXd& pts, const Eigen::VectorXd& y,
                               Eigen::VectorXd& out) const {
    const std::int64_t n = pts.rows();
    out.resize(n);
    switch (family_) {
        case BenefitFamily::Bilinear:
            out.noalias() = pts * y;
            return;
        case BenefitFamily::QuadraticDistance:
            out = -0.5 * (pts.rowwise() - y.transpose()).rowwise().squaredNorm();
            return;
        case BenefitFamily::UserDefined: {
            parallel_for(n, [&](std::int64_t i) {
                Eigen::VectorXd env(pts.cols() + y.size());
                env << pts.row(i).transpose(), y;
                out[i] = expr_.eval(env);
            });
            return;
        }
    }
}

void BenefitFunction::eval_col(const Eigen::VectorXd& x, const Eigen::MatrixXd& y_pts,
                               Eigen::VectorXd& out) const {
    const std::int64_t n = y_pts.rows();
    out.resize(n);
    switch (family_) {
        case BenefitFamily::Bilinear:
            out.noalias() = y_pts * x;
            return;
        case BenefitFamily::QuadraticDistance:
            out = -0.5 * (y_pts.rowwise() - x.transpose()).rowwise().squaredNorm();
            return;
        case BenefitFamily::UserDefined: {
            parallel_for(n, [&](std::int64_t i) {
                Eigen::VectorXd env(x.size() + y_pts.cols());
                env << x, y_pts.row(i).transpose();
                out[i] = expr_.eval(env);
            });
            return;
        }
    }
}

Eigen::VectorXd BenefitFunction::grad_x(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    switch (family_) {
        case BenefitFamily::Bilinear: return y;
        case BenefitFamily::QuadraticDistance: return y - x;
        case BenefitFamily::UserDefined: {
            const int n = dim();
            Eigen::VectorXd g(n);
            for (int d = 0; d < n; ++d) {
                const double h = fd_step_ * (x_domain_.upper[d] - x_domain_.lower[d]);
                Eigen::VectorXd xp = x, xm = x;
                xp[d] += h;
                xm[d] -= h;
                g[d] = (eval_raw(xp, y) - eval_raw(xm, y)) / (2.0 * h);
            }
            return g;
        }
    }
    return Eigen::VectorXd();
}

Eigen::VectorXd BenefitFunction::grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    switch (family_) {
        case BenefitFamily::Bilinear: return x;
        case BenefitFamily::QuadraticDistance: return x - y;
        case BenefitFamily::UserDefined: {
            const int n = dim();
            Eigen::VectorXd g(n);
            for (int d = 0; d < n; ++d) {
                const double h = fd_step_ * (y_domain_.upper[d] - y_domain_.lower[d]);
                Eigen::VectorXd yp = y, ym = y;
                yp[d] += h;
                ym[d] -= h;
                g[d] = (eval_raw(x, yp) - eval_raw(x, ym)) / (2.0 * h);
            }
            return g;
        }
    }
    return Eigen::VectorXd();
}

Eigen::MatrixXd BenefitFunction::cross_hessian(const Eigen::VectorXd& x,
                                               const Eigen::VectorXd& y) const {
    const int n = dim();
    switch (family_) {
        case BenefitFamily::Bilinear: return Eigen::MatrixXd::Identity(n, n);
        case BenefitFamily::QuadraticDistance: return Eigen::MatrixXd::Identity(n, n);
        case BenefitFamily::UserDefined: {
            Eigen::MatrixXd m(n, n);
            for (int i = 0; i < n; ++i) {
                const double hx = fd_step_ * (x_domain_.upper[i] - x_domain_.lower[i]);
                for (int j = 0; j < n; ++j) {
                    const double hy = fd_step_ * (y_domain_.upper[j] - y_domain_.lower[j]);
                    Eigen::VectorXd xp = x, xm = x, yp = y, ym = y;
                    xp[i] += hx;
                    xm[i] -= hx;
                    yp[j] += hy;
                    ym[j] -= hy;
                    m(i, j) = (eval_raw(xp, yp) - eval_raw(xp, ym) - eval_raw(xm, yp) +
                               eval_raw(xm, ym)) /
                              (4.0 * hx * hy);
                }
            }
            return m;
        }
    }
    return Eigen::MatrixXd();
}

Eigen::MatrixXd BenefitFunction::hessian_xx(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& y) const {
    const int n = dim();
    switch (family_) {
        case BenefitFamily::Bilinear: return Eigen::MatrixXd::Zero(n, n);
        case BenefitFamily::QuadraticDistance: return -Eigen::MatrixXd::Identity(n, n);
        case BenefitFamily::UserDefined: {
            Eigen::MatrixXd m(n, n);
            const double b0 = eval_raw(x, y);
            for (int i = 0; i < n; ++i) {
                const double hi = fd_step_ * (x_domain_.upper[i] - x_domain_.lower[i]);
                for (int j = 0; j <= i; ++j) {
                    if (i == j) {
                        Eigen::VectorXd xp = x, xm = x;
                        xp[i] += hi;
                        xm[i] -= hi;
                        m(i, i) = (eval_raw(xp, y) - 2.0 * b0 + eval_raw(xm, y)) / (hi * hi);
                    } else {
                        const double hj = fd_step_ * (x_domain_.upper[j] - x_domain_.lower[j]);
                        Eigen::VectorXd a = x, bq = x, c = x, d = x;
                        a[i] += hi; a[j] += hj;
                        bq[i] += hi; bq[j] -= hj;
                        c[i] -= hi; c[j] += hj;
                        d[i] -= hi; d[j] -= hj;
                        m(i, j) = m(j, i) = (eval_raw(a, y) - eval_raw(bq, y) - eval_raw(c, y) +
                                             eval_raw(d, y)) /
                                            (4.0 * hi * hj);
                    }
                }
            }
            return m;
        }
    }
    return Eigen::MatrixXd();
}

namespace {

// Damped Newton for momentum(z) = target over a closed box: full steps are
// halved until the iterate stays inside, which also pins iterates against the
// boundary when the target has no interior preimage.
Eigen::VectorXd damped_newton(const Box& domain, const Eigen::VectorXd& target,
                              const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& momentum,
                              const std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>& jacobian,
                              const char* label) {
    Eigen::VectorXd z = domain.center();
    for (int it = 0; it < BenefitFunction::newton_max_iter; ++it) {
        const Eigen::VectorXd residual = target - momentum(z);
        if (residual.norm() <= BenefitFunction::newton_tol) return z;
        const Eigen::VectorXd step = jacobian(z).partialPivLu().solve(residual);
        double alpha = 1.0;
        while (alpha > 1e-14 && !domain.contains(z + alpha * step, 1e-12)) alpha *= 0.5;
        if (alpha <= 1e-14) break; // pressed against the boundary
        z += alpha * step;
    }
    throw NoPreimage(std::string(label) + ": no preimage inside the closed domain for target " +
                     point_str(target));
}

} // namespace

Eigen::VectorXd BenefitFunction::invert_Y(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const {
    return damped_newton(
        y_domain_, p, [&](const Eigen::VectorXd& y) { return grad_x(x, y); },
        [&](const Eigen::VectorXd& y) { return cross_hessian(x, y); }, "invert_Y");
}

Eigen::VectorXd BenefitFunction::invert_X(const Eigen::VectorXd& y, const Eigen::VectorXd& q) const {
    return damped_newton(
        x_domain_, q, [&](const Eigen::VectorXd& x) { return grad_y(x, y); },
        [&](const Eigen::VectorXd& x) { return cross_hessian(x, y).transpose(); }, "invert_X");
}

BStarSegment bstar_segment(const BenefitFunction& b, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& y0, const Eigen::VectorXd& y1, int k) {
    if (k < 1) throw DomainError("bstar_segment needs at least one interval");
    BStarSegment seg;
    seg.x0 = x0;
    seg.y_start = y0;
    seg.y_end = y1;
    const Eigen::VectorXd p0 = b.grad_x(x0, y0);
    const Eigen::VectorXd p1 = b.grad_x(x0, y1);
    seg.samples.reserve(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
        const double t = static_cast<double>(i) / k;
        const Eigen::VectorXd pt = (1.0 - t) * p0 + t * p1;
        seg.samples.emplace_back(t, b.invert_Y(x0, pt));
    }
    return seg;
}

double check_B3(const BenefitFunction& b, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                const Eigen::VectorXd& xi, const Eigen::VectorXd& eta, double fd_step_p) {
    const auto phi = [&](const Eigen::VectorXd& q) {
        const Eigen::VectorXd y = b.invert_Y(x, q);
        return xi.dot(b.hessian_xx(x, y) * xi);
    };
    const double s = fd_step_p;
    return (phi(p + s * eta) - 2.0 * phi(p) + phi(p - s * eta)) / (s * s);
}

LoeperReport check_loeper(const BenefitFunction& b, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& y0, const Eigen::VectorXd& y1,
                          std::span<const Eigen::VectorXd> x_samples, int t_samples) {
    const BStarSegment seg = bstar_segment(b, x0, y0, y1, t_samples);
    LoeperReport report;
    report.max_excess = -std::numeric_limits<double>::infinity();
    report.min_second_difference = std::numeric_limits<double>::infinity();
    const int T = static_cast<int>(seg.samples.size());
    std::vector<double> g(static_cast<std::size_t>(T));
    for (const auto& x : x_samples) {
        for (int i = 0; i < T; ++i) {
            const auto& yt = seg.samples[static_cast<std::size_t>(i)].second;
            g[static_cast<std::size_t>(i)] = b.eval(x, yt) - b.eval(x0, yt);
        }
        const double cap = std::max(g.front(), g.back());
        for (int i = 0; i < T; ++i) {
            report.max_excess = std::max(report.max_excess, g[static_cast<std::size_t>(i)] - cap);
            if (i >= 1 && i + 1 < T) {
                const double d2 = g[static_cast<std::size_t>(i) - 1] -
                                  2.0 * g[static_cast<std::size_t>(i)] +
                                  g[static_cast<std::size_t>(i) + 1];
                report.min_second_difference = std::min(report.min_second_difference, d2);
            }
        }
    }
    if (x_samples.empty()) {
        report.max_excess = 0.0;
        report.min_second_difference = 0.0;
    }
    return report;
}

double check_uniform_bstar_convexity(const BenefitFunction& b, const ScalarFn& cost,
                                     std::span<const Eigen::VectorXd> xs,
                                     std::span<const Eigen::VectorXd> ps, double fd_step) {
    if (xs.size() != ps.size())
        throw DomainError("check_uniform_bstar_convexity zips x and p samples; sizes differ");
    const int n = b.dim();
    double min_eig = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const Eigen::VectorXd& x = xs[k];
        const Eigen::VectorXd& p = ps[k];
        const auto psi = [&](const Eigen::VectorXd& q) {
            const Eigen::VectorXd y = b.invert_Y(x, q);
            return cost(y) - b.eval(x, y);
        };
        const double h = fd_step;
        Eigen::MatrixXd H(n, n);
        const double c0 = psi(p);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd ei = Eigen::VectorXd::Zero(n);
            ei[i] = h;
            H(i, i) = (psi(p + ei) - 2.0 * c0 + psi(p - ei)) / (h * h);
            for (int j = 0; j < i; ++j) {
                Eigen::VectorXd ej = Eigen::VectorXd::Zero(n);
                ej[j] = h;
                H(i, j) = H(j, i) =
                    (psi(p + ei + ej) - psi(p + ei - ej) - psi(p - ei + ej) + psi(p - ei - ej)) /
                    (4.0 * h * h);
            }
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    return min_eig;
}

} // namespace bconvex
