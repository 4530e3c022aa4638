#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bconvex/expr.hpp"

using bconvex::Expr;
using bconvex::ParseError;

namespace {
Eigen::VectorXd env2(double a, double b) {
    Eigen::VectorXd e(2);
    e << a, b;
    return e;
}
} // namespace

TEST_CASE("arithmetic and precedence") {
    const Expr e = Expr::parse("1 + 2*3 - 4/2", {});
    CHECK(e.eval(Eigen::VectorXd()) == doctest::Approx(5.0));
    CHECK(Expr::parse("2^3^2", {}).eval(Eigen::VectorXd()) == doctest::Approx(512.0)); // right assoc
    CHECK(Expr::parse("-2^2", {}).eval(Eigen::VectorXd()) == doctest::Approx(-4.0));
    CHECK(Expr::parse("(1+2)*(3-5)", {}).eval(Eigen::VectorXd()) == doctest::Approx(-6.0));
}

TEST_CASE("variables and functions") {
    const Expr e = Expr::parse("x1*y1 + 0.1*x1^2*y1^2", {"x1", "y1"});
    CHECK(e.eval(env2(2.0, 3.0)) == doctest::Approx(6.0 + 0.1 * 4.0 * 9.0));
    CHECK(Expr::parse("exp(log(x1))", {"x1"}).eval(Eigen::VectorXd::Constant(1, 2.5)) ==
          doctest::Approx(2.5));
    CHECK(Expr::parse("sqrt(x1)", {"x1"}).eval(Eigen::VectorXd::Constant(1, 9.0)) ==
          doctest::Approx(3.0));
    CHECK(Expr::parse("pow(x1, 3)", {"x1"}).eval(Eigen::VectorXd::Constant(1, 2.0)) ==
          doctest::Approx(8.0));
    CHECK(Expr::parse("min(x1, y1) + max(x1, y1)", {"x1", "y1"}).eval(env2(1.0, 4.0)) ==
          doctest::Approx(5.0));
    CHECK(Expr::parse("pi", {}).eval(Eigen::VectorXd()) == doctest::Approx(3.14159265358979));
}

TEST_CASE("parse errors name the problem") {
    CHECK_THROWS_AS(Expr::parse("x1 +", {"x1"}), ParseError);
    CHECK_THROWS_AS(Expr::parse("z9", {"x1"}), ParseError);
    CHECK_THROWS_AS(Expr::parse("foo(x1)", {"x1"}), ParseError);
    CHECK_THROWS_AS(Expr::parse("1 + (2", {}), ParseError);
    CHECK_THROWS_AS(Expr::parse("1 2", {}), ParseError);
}
