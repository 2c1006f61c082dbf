#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rdr0/dfe.hpp"
#include "rdr0/models.hpp"
#include "rdr0/spectral.hpp"

using namespace rdr0;

namespace {

CompartmentModel tiny_linear_model() {
    // One infected compartment with linear removal, one uninfected with a
    // constant-recruitment linear balance; F identically zero.
    const Expr I = Expr::variable(1, "I");
    const Expr S = Expr::variable(2, "S");
    CompartmentModel::Setup s;
    s.names = {"I", "S"};
    s.n_infected = 1;
    s.diffusion = {1.0, 1.0};
    s.F = {Expr(), Expr()};
    s.Vplus = {Expr(), Expr::constant(1.0)};
    s.Vminus = {I, S};
    s.dfe_small = {Expr::constant(1.0)};
    s.dfe_large = {{Expr::constant(1.0), Expr::constant(1.0)}};
    return CompartmentModel(std::move(s));
}

} // namespace

TEST_CASE("construction validates structure") {
    const Expr I = Expr::variable(1, "I");
    {
        CompartmentModel::Setup s;
        s.names = {"I", "S"};
        s.n_infected = 1;
        s.diffusion = {1.0, 1.0};
        s.F = {Expr(), I}; // F nonzero on an uninfected row violates (A3)
        s.Vplus = {Expr(), Expr()};
        s.Vminus = {I, Expr()};
        CHECK_THROWS_AS(CompartmentModel(std::move(s)), ValidationError);
    }
    {
        CompartmentModel::Setup s;
        s.names = {"I", "S"};
        s.n_infected = 1;
        s.diffusion = {1.0, 0.0}; // nonpositive diffusion
        s.F = {Expr(), Expr()};
        s.Vplus = {Expr(), Expr()};
        s.Vminus = {I, Expr()};
        CHECK_THROWS_AS(CompartmentModel(std::move(s)), ValidationError);
    }
    {
        CompartmentModel::Setup s;
        s.names = {"I", "S"};
        s.n_infected = 2; // m must stay below n
        s.diffusion = {1.0, 1.0};
        s.F = {Expr(), Expr()};
        s.Vplus = {Expr(), Expr()};
        s.Vminus = {I, Expr()};
        CHECK_THROWS_AS(CompartmentModel(std::move(s)), ValidationError);
    }
}

TEST_CASE("Zika Jacobian blocks match the published matrices") {
    // V(x,u) = [[lambda, -sigma1*Hu],[0, mu*u3]], F = [[0,0],[sigma2*u3, 0]]
    // on disease-free states u = (0, 0, u3).
    const BuiltinModel zika = make_builtin("zika", {{"lambda", "1.5"},
                                                    {"sigma1", "1.25"},
                                                    {"sigma2", "0.75"},
                                                    {"mu", "1.1"},
                                                    {"beta", "1"},
                                                    {"Hu", "2 + cos(pi*x)"}});
    for (double x : {0.0, 0.3, 1.0}) {
        for (double u3 : {0.5, 1.0, 2.5}) {
            const std::vector<double> u{0.0, 0.0, u3};
            const JacobianSample jac = jacobians_at(zika.model, x, u);
            const double Hu = 2.0 + std::cos(M_PI * x);
            CHECK(jac.V(0, 0) == doctest::Approx(1.5));
            CHECK(jac.V(0, 1) == doctest::Approx(-1.25 * Hu));
            CHECK(jac.V(1, 0) == doctest::Approx(0.0));
            CHECK(jac.V(1, 1) == doctest::Approx(1.1 * u3));
            CHECK(jac.F(0, 0) == doctest::Approx(0.0));
            CHECK(jac.F(0, 1) == doctest::Approx(0.0));
            CHECK(jac.F(1, 0) == doctest::Approx(0.75 * u3));
            CHECK(jac.F(1, 1) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("vector-host Jacobian blocks at the disease-free state") {
    const BuiltinModel vh = make_builtin("vector_host", {{"beta_s", "1.5"},
                                                         {"beta_m", "0.5"},
                                                         {"b", "1.25"},
                                                         {"gamma", "0.75"},
                                                         {"c", "2"}});
    const std::vector<double> u{0.0, 0.0, 3.0, 4.0}; // (I, V, S, M)
    const JacobianSample jac = jacobians_at(vh.model, 0.5, u);
    CHECK(jac.F(0, 1) == doctest::Approx(1.5 * 3.0)); // beta_s * S
    CHECK(jac.F(1, 0) == doctest::Approx(0.5 * 4.0)); // beta_m * M
    CHECK(jac.F(0, 0) == doctest::Approx(0.0));
    CHECK(jac.F(1, 1) == doctest::Approx(0.0));
    CHECK(jac.V(0, 0) == doctest::Approx(1.25 + 0.75)); // b + gamma
    CHECK(jac.V(1, 1) == doctest::Approx(2.0));         // c
    CHECK(jac.V(0, 1) == doctest::Approx(0.0));
    CHECK(jac.V(1, 0) == doctest::Approx(0.0));
    // M block is diag(-b, -c) at the DFE
    CHECK(jac.M(0, 0) == doctest::Approx(-1.25));
    CHECK(jac.M(1, 1) == doctest::Approx(-2.0));
}

TEST_CASE("F of a transmission-free model differentiates to zero") {
    const CompartmentModel model = tiny_linear_model();
    const JacobianSample jac = jacobians_at(model, 0.2, std::vector<double>{0.3, 1.0});
    CHECK(jac.F(0, 0) == 0.0);
    CHECK(jac.V(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("Jacobians agree with finite differences of the reaction pieces") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(0.3, 1.8), xs(0.0, 1.0);
    const BuiltinModel staged = make_builtin("staged", {{"m", "3"},
                                                        {"alpha", "0.5"},
                                                        {"beta_1", "1 + 0.4*cos(pi*x)"},
                                                        {"nu_2", "1.3"},
                                                        {"lambda", "1.2"}});
    const CompartmentModel& model = staged.model;
    for (int trial = 0; trial < 10; ++trial) {
        const double x = xs(rng);
        std::vector<double> u(4);
        for (auto& v : u)
            v = pos(rng);
        const JacobianSample jac = jacobians_at(model, x, u);
        for (int i = 0; i < model.m(); ++i) {
            const Expr Vi = model.Vminus_expr(i) - model.Vplus_expr(i);
            for (int j = 0; j < model.m(); ++j) {
                const double fdF =
                    testing::central_difference(model.F_expr(i), j + 1, x, u, 1e-6);
                const double fdV = testing::central_difference(Vi, j + 1, x, u, 1e-6);
                CHECK(std::abs(jac.F(i, j) - fdF) <= 1e-6 * std::max(1.0, std::abs(fdF)));
                CHECK(std::abs(jac.V(i, j) - fdV) <= 1e-6 * std::max(1.0, std::abs(fdV)));
            }
        }
    }
}

TEST_CASE("check_assumptions passes for every builtin at its defaults") {
    for (const auto& name : builtin_names()) {
        const BuiltinModel b = make_builtin(name);
        const Grid grid = b.model.make_grid(65);
        const DfeState dfe = solve_dfe(b.model, grid);
        const AssumptionReport report = check_assumptions(b.model, grid, dfe.values);
        INFO(name, ": ", report.summary());
        CHECK(report.all_passed());
        CHECK(report.spectral_preconditions_ok);
    }
}

TEST_CASE("scalar SIS spectral bound is the negated removal rate") {
    const BuiltinModel sis = make_builtin("sis", {{"beta", "2"}, {"gamma", "1 + 0.5*x"}});
    const Grid grid = sis.model.make_grid(33);
    // s(-V(x)) = -gamma(x) nodewise; cooperativity is vacuous for m = 1.
    for (int k : {0, 16, 32}) {
        const std::vector<double> u{0.0, 1.0};
        const JacobianSample jac = jacobians_at(sis.model, grid.node(k), u);
        const SpectralResult s = spectral_bound_cooperative(-jac.V, 1e-12);
        CHECK(s.value == doctest::Approx(-(1.0 + 0.5 * grid.node(k))).epsilon(1e-10));
    }
    const DfeState dfe = solve_dfe(sis.model, grid);
    CHECK(check_assumptions(sis.model, grid, dfe.values).all_passed());
}

TEST_CASE("a removal rate with a negative region fails the checks") {
    // V-_I = (0.6 - x) I turns negative for x > 0.6: (A1) fails and
    // s(-V) >= 0 on part of the domain.
    const Expr I = Expr::variable(1, "I");
    const Expr S = Expr::variable(2, "S");
    const Expr x = Expr::variable(0, "x");
    CompartmentModel::Setup s;
    s.names = {"I", "S"};
    s.n_infected = 1;
    s.diffusion = {1.0, 1.0};
    s.F = {S * I, Expr()};
    s.Vplus = {Expr(), Expr::constant(1.0)};
    s.Vminus = {(Expr::constant(0.6) - x) * I, S};
    s.dfe_small = {Expr::constant(1.0)};
    const CompartmentModel model(std::move(s));
    const Grid grid = model.make_grid(33);
    const DfeState dfe = solve_dfe(model, grid);
    const AssumptionReport report = check_assumptions(model, grid, dfe.values);
    CHECK_FALSE(report.all_passed());
    CHECK_FALSE(report.spectral_preconditions_ok);
    bool a1_failed = false, sv_failed = false;
    for (const auto& c : report.checks) {
        if (c.name.find("(A1)") != std::string::npos && !c.passed)
            a1_failed = true;
        if (c.name.find("s(-V") != std::string::npos && !c.passed)
            sv_failed = true;
    }
    CHECK(a1_failed);
    CHECK(sv_failed);
}

TEST_CASE("reducible coupling pattern is reported") {
    // Two infected compartments with V = I and F = [[0,0],[1,0]]: no path
    // back from compartment 2 to compartment 1.
    const Expr I1 = Expr::variable(1, "I1");
    const Expr I2 = Expr::variable(2, "I2");
    const Expr S = Expr::variable(3, "S");
    CompartmentModel::Setup s;
    s.names = {"I1", "I2", "S"};
    s.n_infected = 2;
    s.diffusion = {1.0, 1.0, 1.0};
    s.F = {Expr(), I1 * S, Expr()};
    s.Vplus = {Expr(), Expr(), Expr::constant(1.0)};
    s.Vminus = {I1, I2, S};
    s.dfe_small = {Expr::constant(1.0)};
    const CompartmentModel model(std::move(s));
    const Grid grid = model.make_grid(17);
    const DfeState dfe = solve_dfe(model, grid);
    const AssumptionReport report = check_assumptions(model, grid, dfe.values);
    bool irreducibility_failed = false;
    for (const auto& c : report.checks)
        if (c.name.find("irreducibility") != std::string::npos && !c.passed)
            irreducibility_failed = true;
    CHECK(irreducibility_failed);
}

TEST_CASE("domain violations in Jacobian evaluation name the entry") {
    const BuiltinModel staged = make_builtin("staged", {{"m", "2"}, {"alpha", "1"}});
    const std::vector<double> zero_state{0.0, 0.0, 0.0}; // N = 0: h singular
    try {
        jacobians_at(staged.model, 0.5, zero_state);
        FAIL("expected EvalDomainError");
    } catch (const EvalDomainError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("entry") != std::string::npos);
    }
}
