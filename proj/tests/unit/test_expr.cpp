#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rdr0/expr.hpp"

using namespace rdr0;

namespace {
const std::vector<std::string> kX = {"x"};
const std::vector<std::string> kXU3 = {"x", "u1", "u2", "u3"};
} // namespace

TEST_CASE("parse and evaluate basic forms") {
    const Expr e = parse_expression("2 + cos(pi*x)", kX);
    CHECK(e.evaluate(0.0, {}) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(e.evaluate(1.0, {}) == doctest::Approx(1.0).epsilon(1e-15));

    const Expr proj = parse_expression("u3", kXU3);
    const std::vector<double> u{0.0, 0.0, 5.0};
    CHECK(proj.evaluate(0.3, u) == 5.0);

    const Expr ratio = parse_expression("u1*u3/(u1+u2+u3)", kXU3);
    const std::vector<double> w{1.0, 2.0, 3.0};
    CHECK(ratio.evaluate(0.0, w) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("unknown identifiers and syntax errors carry positions") {
    CHECK_THROWS_AS(parse_expression("beta", kX), UnknownIdentifierError);
    try {
        parse_expression("beta", kX);
    } catch (const UnknownIdentifierError& e) {
        CHECK(e.name() == "beta");
        CHECK(e.position() == 0);
    }
    CHECK_THROWS_AS(parse_expression("2+*3", kX), ParseError);
    try {
        parse_expression("2+*3", kX);
    } catch (const ParseError& e) {
        CHECK(e.position() == 2);
    }
    CHECK_THROWS_AS(parse_expression("", kX), ParseError);
    CHECK_THROWS_AS(parse_expression("(2+x", kX), ParseError);
    CHECK_THROWS_AS(parse_expression("2+x)", kX), ParseError);
}

TEST_CASE("domain violations are tagged, never silent NaN") {
    const std::vector<double> zero{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(parse_expression("1/u1", kXU3).evaluate(0.0, zero), EvalDomainError);
    CHECK_THROWS_AS(parse_expression("log(x-1)", kX).evaluate(0.0, {}), EvalDomainError);
    CHECK_THROWS_AS(parse_expression("sqrt(x-2)", kX).evaluate(0.0, {}), EvalDomainError);
    CHECK_THROWS_AS(parse_expression("pow(u1, -0.5)", kXU3).evaluate(0.0, zero), EvalDomainError);
    CHECK_THROWS_AS(parse_expression("exp(1/x)", kX).evaluate(1e-300, {}), EvalDomainError);
    try {
        parse_expression("1/u1", kXU3).evaluate(0.0, zero);
    } catch (const EvalDomainError& e) {
        CHECK(e.fault() == EvalFault::DivisionByZero);
    }
}

TEST_CASE("precedence: unary minus binds tighter than power") {
    // -x^2 parses as (-x)^2
    const Expr e = parse_expression("-x^2", kX);
    CHECK(e.evaluate(3.0, {}) == doctest::Approx(9.0));
    const Expr f = parse_expression("2*x^2", kX);
    CHECK(f.evaluate(3.0, {}) == doctest::Approx(18.0));
    const Expr g = parse_expression("2 - -x", kX);
    CHECK(g.evaluate(3.0, {}) == doctest::Approx(5.0));
    // whitespace is insignificant
    const Expr h = parse_expression("  2\t+ cos( pi * x )", kX);
    CHECK(h.evaluate(0.0, {}) == doctest::Approx(3.0));
}

TEST_CASE("pow requires a constant exponent") {
    CHECK_NOTHROW(parse_expression("x^(1+1)", kX));
    CHECK(parse_expression("x^(1+1)", kX).evaluate(3.0, {}) == doctest::Approx(9.0));
    CHECK_THROWS_AS(parse_expression("x^u1", kXU3), ParseError);
    CHECK_THROWS_AS(parse_expression("pow(x, u1)", kXU3), ParseError);
    CHECK(parse_expression("pow(u1+u2+u3, -0.5)", kXU3)
              .evaluate(0.0, std::vector<double>{1.0, 1.0, 2.0}) == doctest::Approx(0.5));
}

TEST_CASE("symbolic derivatives fold to compact forms") {
    const Expr e = parse_expression("2.5*u1*u3", kXU3);
    const Expr d = e.derivative(1); // d/du1
    CHECK(d.to_string() == "2.5*u3");

    const Expr c = parse_expression("cos(pi*x)", kXU3);
    CHECK(c.derivative(2).is_zero()); // d/du2

    const Expr lin = parse_expression("u1", kXU3);
    double v = 0.0;
    CHECK(lin.derivative(1).is_constant(&v));
    CHECK(v == 1.0);
}

TEST_CASE("derivative matches central finite differences on the staged incidence term") {
    // h(N) * (beta1(x) u1 + beta2 u2) * u3 with h(N) = N^-0.5, N = u1+u2+u3.
    const Expr e = parse_expression(
        "pow(u1+u2+u3, -0.5) * ((1.5 + 0.5*cos(pi*x))*u1 + 1.2*u2) * u3", kXU3);
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> pos(0.5, 2.0), xs(0.0, 1.0);
    for (int slot = 1; slot <= 3; ++slot) {
        const Expr d = e.derivative(slot);
        for (int trial = 0; trial < 20; ++trial) {
            const double x = xs(rng);
            std::vector<double> u{pos(rng), pos(rng), pos(rng)};
            const double sym = d.evaluate(x, u);
            const double fd = testing::central_difference(e, slot, x, u, 1e-6);
            CHECK(std::abs(sym - fd) <= 1e-6 * std::max(1.0, std::abs(sym)));
        }
    }
}

TEST_CASE("print/parse round trip evaluates identically") {
    const std::vector<std::string> exprs = {
        "2 + cos(pi*x)",
        "u1*u3/(u1+u2+u3)",
        "pow(u1+u2+u3, -0.5) * ((1.5 + 0.5*cos(pi*x))*u1 + 1.2*u2) * u3",
        "-x^2 + exp(-x)*sqrt(u1+1) - abs(u2-u3)/(1+u1)",
        "1 - 2/(x+3) - 4*x",
    };
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(0.1, 2.0);
    for (const auto& text : exprs) {
        const Expr e = parse_expression(text, kXU3);
        const Expr back = parse_expression(e.to_string(), kXU3);
        for (int trial = 0; trial < 30; ++trial) {
            const double x = pos(rng);
            std::vector<double> u{pos(rng), pos(rng), pos(rng)};
            CHECK(back.evaluate(x, u) == doctest::Approx(e.evaluate(x, u)).epsilon(1e-14));
        }
    }
    // derivatives round-trip too
    const Expr d = parse_expression(exprs[2], kXU3).derivative(3);
    const Expr back = parse_expression(d.to_string(), kXU3);
    std::vector<double> u{1.1, 0.7, 1.3};
    CHECK(back.evaluate(0.4, u) == doctest::Approx(d.evaluate(0.4, u)).epsilon(1e-14));
}

TEST_CASE("abs derivative is formal; evaluation at the kink fails loudly") {
    const Expr e = parse_expression("abs(u1)", kXU3);
    const Expr d = e.derivative(1);
    std::vector<double> u{2.0, 0.0, 0.0};
    CHECK(d.evaluate(0.0, u) == doctest::Approx(1.0));
    u[0] = -2.0;
    CHECK(d.evaluate(0.0, u) == doctest::Approx(-1.0));
    u[0] = 0.0;
    CHECK_THROWS_AS(d.evaluate(0.0, u), EvalDomainError);
}

TEST_CASE("neg as a function and pi as a constant") {
    CHECK(parse_expression("neg(x)", kX).evaluate(2.0, {}) == -2.0);
    CHECK(parse_expression("pi", kX).evaluate(0.0, {}) == doctest::Approx(M_PI));
    // vocabulary entries may shadow nothing; pi resolves before constants map
    CHECK(parse_expression("2*pi", kX, {{"a", 7.0}}).evaluate(0.0, {}) ==
          doctest::Approx(2.0 * M_PI));
    CHECK(parse_expression("a*x", kX, {{"a", 7.0}}).evaluate(2.0, {}) == doctest::Approx(14.0));
}
