#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bconvex/benefit.hpp"
#include "bconvex/rng.hpp"

#include "oracles.hpp"

using namespace bconvex;
using oracles::box1d;
using oracles::box2d;
using oracles::vec1;
using oracles::vec2;

namespace {

BenefitFunction bilinear2() { return BenefitFunction::bilinear(box2d(0.0, 1.0), box2d(-1.0, 2.0)); }

BenefitFunction quad2() {
    return BenefitFunction::quadratic_distance(box2d(-1.0, 1.0), box2d(-1.0, 1.0));
}

Eigen::VectorXd random_in(const Box& box, Rng& rng, double shrink = 1.0) {
    Eigen::VectorXd p(box.dim());
    const Eigen::VectorXd c = box.center();
    for (int d = 0; d < box.dim(); ++d) p[d] = rng.uniform(box.lower[d], box.upper[d]);
    return c + shrink * (p - c);
}

} // namespace

TEST_CASE("gradients: closed forms and fd oracle") {
    const auto b = bilinear2();
    CHECK((b.grad_x(vec2(0.3, 0.7), vec2(1.0, 2.0)) - vec2(1.0, 2.0)).norm() == 0.0);
    CHECK(b.grad_x(vec2(0.5, 0.5), vec2(0.0, 0.0)).norm() == 0.0);

    const auto q = quad2();
    // b_x = y - x, checked against central differences
    const Eigen::VectorXd x = vec2(0.0, 0.0), y = vec2(1.0, 1.0);
    CHECK((q.grad_x(x, y) - vec2(1.0, 1.0)).norm() < 1e-14);
    const auto f = [&](const Eigen::VectorXd& xx) { return -0.5 * (xx - y).squaredNorm(); };
    const Eigen::VectorXd g_fd = oracles::fd_gradient(f, x, 1e-4);
    CHECK((q.grad_x(x, y) - g_fd).norm() < 10.0 * 1e-4 * 1e-4);
}

TEST_CASE("fd derivatives of built-ins match closed forms") {
    Rng rng(42);
    const auto b = bilinear2();
    const auto q = quad2();
    const double h = 1e-4;
    for (int t = 0; t < 50; ++t) {
        const Eigen::VectorXd x = random_in(b.x_domain(), rng, 0.9);
        const Eigen::VectorXd y = random_in(b.y_domain(), rng, 0.9);
        const auto fb = [&](const Eigen::VectorXd& xx) { return xx.dot(y); };
        CHECK((b.grad_x(x, y) - oracles::fd_gradient(fb, x, h)).norm() < 10.0 * h * h);
        const Eigen::VectorXd xq = random_in(q.x_domain(), rng, 0.9);
        const Eigen::VectorXd yq = random_in(q.y_domain(), rng, 0.9);
        const auto fq = [&](const Eigen::VectorXd& xx) { return -0.5 * (xx - yq).squaredNorm(); };
        CHECK((q.grad_x(xq, yq) - oracles::fd_gradient(fq, xq, h)).norm() < 10.0 * h * h);
    }
}

TEST_CASE("user-defined derivatives against analytic oracle") {
    const auto b = BenefitFunction::user_defined("x1*y1 + 0.1*x1^2*y1^2", box1d(0.0, 1.0),
                                                 box1d(0.0, 1.0));
    const Eigen::VectorXd x = vec1(0.3), y = vec1(0.6);
    // d/dx = y + 0.2 x y^2 ; d/dy = x + 0.2 x^2 y
    CHECK(b.grad_x(x, y)[0] == doctest::Approx(0.6 + 0.2 * 0.3 * 0.36).epsilon(1e-6));
    CHECK(b.grad_y(x, y)[0] == doctest::Approx(0.3 + 0.2 * 0.09 * 0.6).epsilon(1e-6));
    // d2/dxdy = 1 + 0.4 x y
    CHECK(b.cross_hessian(x, y)(0, 0) == doctest::Approx(1.0 + 0.4 * 0.18).epsilon(1e-5));
    CHECK(b.hessian_xx(x, y)(0, 0) == doctest::Approx(0.2 * 0.36).epsilon(1e-4));
}

TEST_CASE("domain errors and degenerate families are rejected") {
    const auto b = bilinear2();
    CHECK_THROWS_AS(b.eval(vec2(2.0, 0.0), vec2(0.0, 0.0)), DomainError);
    CHECK_THROWS_AS(b.grad_x(vec2(0.5, 0.5), vec2(0.0, 3.0)), DomainError);
    // b_x1y1 = 1 - 2 x1 y1 hits zero inside [0,1]^2: the B1 witness must refuse
    CHECK_THROWS_AS(BenefitFunction::user_defined("x1*y1 + x2*y2 - 0.5*x1^2*y1^2",
                                                  box2d(0.0, 1.2), box2d(0.0, 1.2)),
                    DomainError);
}

TEST_CASE("invert_Y closed forms") {
    const auto b = bilinear2();
    const Eigen::VectorXd p = vec2(0.4, -0.1);
    CHECK((b.invert_Y(vec2(0.2, 0.9), p) - p).norm() < 1e-10);
    // momentum outside the product box has no preimage
    CHECK_THROWS_AS(b.invert_Y(vec2(0.2, 0.9), vec2(0.0, 5.0)), NoPreimage);

    const auto q = quad2();
    // Y(x,p) = x + p
    const Eigen::VectorXd y = q.invert_Y(vec2(0.2, 0.2), vec2(0.1, 0.0));
    CHECK((y - vec2(0.3, 0.2)).norm() < 1e-10);
    CHECK((q.grad_x(vec2(0.2, 0.2), y) - vec2(0.1, 0.0)).norm() < 1e-10);
}

TEST_CASE("round trip invert_Y(grad_x) over random pairs") {
    Rng rng(7);
    const auto b = bilinear2();
    const auto q = quad2();
    for (int t = 0; t < 200; ++t) {
        const Eigen::VectorXd x = random_in(b.x_domain(), rng);
        const Eigen::VectorXd y = random_in(b.y_domain(), rng, 0.98);
        CHECK((b.invert_Y(x, b.grad_x(x, y)) - y).norm() < 1e-9);
        const Eigen::VectorXd xq = random_in(q.x_domain(), rng);
        const Eigen::VectorXd yq = random_in(q.y_domain(), rng, 0.98);
        CHECK((q.invert_Y(xq, q.grad_x(xq, yq)) - yq).norm() < 1e-9);
    }
    // user-defined family goes through the fd Jacobian path
    const auto ub = BenefitFunction::user_defined("x1*y1 + 0.1*x1^2*y1^2", box1d(0.0, 1.0),
                                                  box1d(0.0, 1.0));
    for (int t = 0; t < 50; ++t) {
        const Eigen::VectorXd x = random_in(ub.x_domain(), rng);
        const Eigen::VectorXd y = random_in(ub.y_domain(), rng, 0.95);
        CHECK((ub.invert_Y(x, ub.grad_x(x, y)) - y).norm() < 1e-8);
    }
}

TEST_CASE("b*-segments") {
    const auto b = bilinear2();
    const Eigen::VectorXd y0 = vec2(-0.5, 0.0), y1 = vec2(1.5, 1.0);
    const auto seg = bstar_segment(b, vec2(0.3, 0.3), y0, y1, 8);
    REQUIRE(seg.samples.size() == 9);
    for (const auto& [t, yt] : seg.samples)
        CHECK((yt - ((1.0 - t) * y0 + t * y1)).norm() < 1e-10); // bilinear: straight line
    CHECK((seg.samples.front().second - y0).norm() < 1e-10);
    CHECK((seg.samples.back().second - y1).norm() < 1e-10);

    const auto q = quad2();
    const auto segq = bstar_segment(q, vec2(0.0, 0.0), vec2(0.0, 0.0), vec2(1.0, 0.0), 2);
    CHECK((segq.samples[1].second - vec2(0.5, 0.0)).norm() < 1e-10);

    // momentum linearity at every sample
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXd x0 = random_in(q.x_domain(), rng);
        const Eigen::VectorXd a = random_in(q.y_domain(), rng, 0.9);
        const Eigen::VectorXd c = random_in(q.y_domain(), rng, 0.9);
        const auto s = bstar_segment(q, x0, a, c, 6);
        const Eigen::VectorXd p0 = q.grad_x(x0, a), p1 = q.grad_x(x0, c);
        for (const auto& [tt, yt] : s.samples)
            CHECK((q.grad_x(x0, yt) - ((1.0 - tt) * p0 + tt * p1)).norm() < 1e-8);
    }
}

TEST_CASE("B3 form: zero for built-ins, negative for the manufactured violator") {
    Rng rng(3);
    const auto b = bilinear2();
    const auto q = quad2();
    for (int t = 0; t < 200; ++t) {
        const Eigen::VectorXd x = random_in(b.x_domain(), rng);
        const Eigen::VectorXd y = random_in(b.y_domain(), rng, 0.85);
        const Eigen::VectorXd xi = rng.unit_vector(2), eta = rng.unit_vector(2);
        CHECK(std::abs(check_B3(b, x, b.grad_x(x, y), xi, eta, 1e-3)) < 1e-8);
        const Eigen::VectorXd xq = random_in(q.x_domain(), rng);
        const Eigen::VectorXd yq = random_in(q.y_domain(), rng, 0.85);
        CHECK(std::abs(check_B3(q, xq, q.grad_x(xq, yq), xi, eta, 1e-3)) < 1e-6);
    }

    // b = x.y - 0.5 x1^2 y1^2 on a box where B1 still holds: at x=0 the form is
    // -4c xi1^2 eta1^2 with c = 0.5
    const auto viol = BenefitFunction::user_defined("x1*y1 + x2*y2 - 0.5*x1^2*y1^2",
                                                    box2d(0.0, 0.6), box2d(0.0, 0.6));
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(2), eta = Eigen::VectorXd::Zero(2);
    xi[0] = 1.0;
    eta[0] = 1.0;
    const Eigen::VectorXd x0 = vec2(0.0, 0.0);
    const Eigen::VectorXd p = viol.grad_x(x0, vec2(0.3, 0.3));
    const double form = check_B3(viol, x0, p, xi, eta, 1e-3);
    CHECK(form == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(form < -1e-6);

    // the strict-B3 positive-quartic family stays nonnegative (sampled gate)
    const auto strict = BenefitFunction::user_defined("x1*y1 + 0.1*x1^2*y1^2", box1d(0.0, 1.0),
                                                      box1d(0.0, 1.0));
    double min_form = 1e300;
    for (int t = 0; t < 200; ++t) {
        const Eigen::VectorXd x = random_in(strict.x_domain(), rng);
        const Eigen::VectorXd y = random_in(strict.y_domain(), rng, 0.85);
        Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
        min_form = std::min(min_form, check_B3(strict, x, strict.grad_x(x, y), one, one, 1e-3));
    }
    CHECK(min_form > -1e-6);
}

TEST_CASE("Loeper maximum principle for built-ins") {
    Rng rng(5);
    const auto b = bilinear2();
    const auto q = quad2();
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Eigen::VectorXd> xs;
        for (int k = 0; k < 6; ++k) xs.push_back(random_in(b.x_domain(), rng));
        const auto rep = check_loeper(b, random_in(b.x_domain(), rng),
                                      random_in(b.y_domain(), rng, 0.9),
                                      random_in(b.y_domain(), rng, 0.9), xs, 12);
        CHECK(rep.max_excess <= 1e-8);
        CHECK(rep.min_second_difference >= -1e-8);

        std::vector<Eigen::VectorXd> xqs;
        for (int k = 0; k < 6; ++k) xqs.push_back(random_in(q.x_domain(), rng));
        const auto repq = check_loeper(q, random_in(q.x_domain(), rng),
                                       random_in(q.y_domain(), rng, 0.9),
                                       random_in(q.y_domain(), rng, 0.9), xqs, 12);
        CHECK(repq.max_excess <= 1e-8);
        CHECK(repq.min_second_difference >= -1e-8);
    }
    // x = x0 gives g == 0
    const Eigen::VectorXd x0 = vec2(0.4, 0.4);
    std::vector<Eigen::VectorXd> same{x0};
    const auto rep0 = check_loeper(b, x0, vec2(0.0, 0.0), vec2(1.0, 1.0), same, 8);
    CHECK(std::abs(rep0.max_excess) < 1e-12);
}

TEST_CASE("uniform b*-convexity of the cost (fd oracle values)") {
    Rng rng(9);
    const auto half_sq = [](const Eigen::VectorXd& y) { return 0.5 * y.squaredNorm(); };
    const auto full_sq = [](const Eigen::VectorXd& y) { return y.squaredNorm(); };
    const auto b = bilinear2();
    const auto q = quad2();
    std::vector<Eigen::VectorXd> xs, ps, xqs, pqs;
    for (int t = 0; t < 40; ++t) {
        const Eigen::VectorXd x = random_in(b.x_domain(), rng);
        xs.push_back(x);
        ps.push_back(b.grad_x(x, random_in(b.y_domain(), rng, 0.8)));
        const Eigen::VectorXd xq = random_in(q.x_domain(), rng);
        xqs.push_back(xq);
        pqs.push_back(q.grad_x(xq, random_in(q.y_domain(), rng, 0.8)));
    }
    CHECK(check_uniform_bstar_convexity(b, half_sq, xs, ps) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(check_uniform_bstar_convexity(b, full_sq, xs, ps) == doctest::Approx(2.0).epsilon(1e-6));
    // c(x+p) - b(x,x+p) = |x+p|^2 + |p|^2/2 has Hessian 3I
    CHECK(check_uniform_bstar_convexity(q, full_sq, xqs, pqs) == doctest::Approx(3.0).epsilon(1e-6));
}
