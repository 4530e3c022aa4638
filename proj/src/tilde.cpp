#include "bconvex/tilde.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "bconvex/rng.hpp"

namespace bconvex {

TildeChart::TildeChart(const BenefitFunction& b, Eigen::VectorXd x0, Eigen::VectorXd y0)
    : b_(&b), x0_(std::move(x0)), y0_(std::move(y0)) {
    if (!b.x_domain().contains(x0_, 1e-9) || !b.y_domain().contains(y0_, 1e-9))
        throw DomainError("chart anchor lies outside the closed product domain");
    cross_at_anchor_ = b.cross_hessian(x0_, y0_);
    normalizer_ = cross_at_anchor_.partialPivLu().inverse();
    const double residual =
        (normalizer_ * cross_at_anchor_ - Eigen::MatrixXd::Identity(b.dim(), b.dim()))
            .cwiseAbs()
            .maxCoeff();
    if (!(residual <= 1e-8))
        throw DomainError("cross-derivative matrix is too ill-conditioned to normalize");
    bx_at_anchor_ = b.grad_x(x0_, y0_);
    by_at_anchor_ = b.grad_y(x0_, y0_);
    b_at_anchor_ = b.eval(x0_, y0_);
}

Eigen::VectorXd TildeChart::to_tilde_x(const Eigen::VectorXd& x) const {
    return b_->grad_y(x, y0_) - by_at_anchor_;
}

Eigen::VectorXd TildeChart::to_tilde_y(const Eigen::VectorXd& y) const {
    return normalizer_ * (b_->grad_x(x0_, y) - bx_at_anchor_);
}

Eigen::VectorXd TildeChart::from_tilde_x(const Eigen::VectorXd& tx) const {
    return b_->invert_X(y0_, by_at_anchor_ + tx);
}

Eigen::VectorXd TildeChart::from_tilde_y(const Eigen::VectorXd& ty) const {
    return b_->invert_Y(x0_, bx_at_anchor_ + cross_at_anchor_ * ty);
}

double TildeChart::tilde_u(const BConvexFunction& u, const Eigen::VectorXd& tx) const {
    const Eigen::VectorXd x = from_tilde_x(tx);
    return u.eval(x) - (u.eval(x0_) + b_->eval(x, y0_) - b_at_anchor_);
}

double TildeChart::tilde_b(const Eigen::VectorXd& tx, const Eigen::VectorXd& ty) const {
    const Eigen::VectorXd x = from_tilde_x(tx);
    const Eigen::VectorXd y = from_tilde_y(ty);
    return b_->eval(x, y) - b_->eval(x0_, y) - b_->eval(x, y0_) + b_at_anchor_;
}

TildeGeometryReport verify_tilde_geometry(const TildeChart& chart, const BConvexFunction& u,
                                          int probes, std::uint64_t seed,
                                          double probe_radius_frac) {
    const BenefitFunction& b = chart.benefit();
    const Box& X = b.x_domain();
    const Box& Y = b.y_domain();
    const int n = b.dim();
    Rng rng(seed);

    const auto random_domain_point = [&](const Box& box) {
        for (int tries = 0; tries < 256; ++tries) {
            Eigen::VectorXd p(n);
            for (int d = 0; d < n; ++d) p[d] = rng.uniform(box.lower[d], box.upper[d]);
            if (box.contains(p)) return p;
        }
        return box.center();
    };

    TildeGeometryReport report;
    report.min_midpoint_defect = std::numeric_limits<double>::infinity();

    // (i) midpoint convexity of the transformed utility along random segments.
    // Probes are built from domain points, so preimages exist by construction;
    // midpoints may still fall outside the chart range and are skipped.
    std::vector<std::pair<Eigen::VectorXd, double>> tilde_samples; // (x~, u~)
    int used = 0;
    for (int k = 0; k < probes; ++k) {
        const Eigen::VectorXd p = chart.to_tilde_x(random_domain_point(X));
        const Eigen::VectorXd q = chart.to_tilde_x(random_domain_point(X));
        try {
            const double up = chart.tilde_u(u, p);
            const double uq = chart.tilde_u(u, q);
            const double um = chart.tilde_u(u, 0.5 * (p + q));
            report.min_midpoint_defect =
                std::min(report.min_midpoint_defect, 0.5 * (up + uq) - um);
            tilde_samples.emplace_back(p, up);
            tilde_samples.emplace_back(q, uq);
            ++used;
        } catch (const NoPreimage&) {
            continue;
        } catch (const DomainError&) {
            continue;
        }
    }
    report.probes_used = used;
    if (used == 0) report.min_midpoint_defect = 0.0;

    // (ii) fourth-order expansion remainder near the anchor.
    const double rx = probe_radius_frac * X.diameter();
    const double ry = probe_radius_frac * Y.diameter();
    for (int k = 0; k < probes; ++k) {
        const Eigen::VectorXd tx = chart.to_tilde_x(random_domain_point(X));
        const Eigen::VectorXd ty = chart.to_tilde_y(random_domain_point(Y));
        if (tx.norm() > rx || ty.norm() > ry) continue;
        const double denom = tx.squaredNorm() * ty.squaredNorm();
        if (denom < 1e-12) continue;
        try {
            const double remainder = chart.tilde_b(tx, ty) - tx.dot(ty);
            report.max_expansion_ratio =
                std::max(report.max_expansion_ratio, std::abs(remainder) / denom);
        } catch (const NoPreimage&) {
            continue;
        }
    }

    // (iii) convexity of sublevel sets of the transformed utility: midpoints of
    // member pairs must stay inside the section.
    if (!tilde_samples.empty()) {
        double max_u = 0.0;
        for (const auto& s : tilde_samples) max_u = std::max(max_u, s.second);
        for (const double frac : {0.25, 0.5, 0.75}) {
            const double h = frac * max_u;
            if (h <= 0.0) continue;
            std::vector<const std::pair<Eigen::VectorXd, double>*> members;
            for (const auto& s : tilde_samples)
                if (s.second < h) members.push_back(&s);
            const int pairs = std::min<int>(probes, static_cast<int>(members.size()));
            for (int k = 0; k + 1 < pairs; k += 2) {
                const auto& a = *members[static_cast<std::size_t>(k)];
                const auto& c = *members[static_cast<std::size_t>(k) + 1];
                try {
                    const double um = chart.tilde_u(u, 0.5 * (a.first + c.first));
                    report.section_defect = std::max(report.section_defect, um - h);
                } catch (const NoPreimage&) {
                    continue;
                }
            }
        }
        report.section_defect = std::max(report.section_defect, 0.0);
    }
    return report;
}

} // namespace bconvex
