#include <doctest.h>

#include <cmath>

#include "rdr0/dfe.hpp"
#include "rdr0/models.hpp"

using namespace rdr0;

TEST_CASE("vector-host linear recruitment gives a constant susceptible state") {
    for (double d3 : {1e-3, 1.0, 1e3}) {
        const BuiltinModel vh = make_builtin("vector_host");
        const CompartmentModel model = vh.model.with_diffusion({1.0, 1.0, d3, 1.0});
        const Grid grid = model.make_grid(65);
        const DfeState dfe = solve_dfe(model, grid);
        CHECK((dfe.values.col(0).array() - 1.0).abs().maxCoeff() <= 1e-12);
        CHECK((dfe.values.col(1).array() - 1.0).abs().maxCoeff() <= 1e-12);
        CHECK(dfe.residual <= std::max(1e-10, dfe.residual_floor));
    }
}

TEST_CASE("Zika logistic equilibrium with constant rates") {
    const BuiltinModel zika = make_builtin("zika");
    const Grid grid = zika.model.make_grid(65);
    const DfeState dfe = solve_dfe(zika.model, grid);
    CHECK((dfe.values.col(0).array() - 1.0).abs().maxCoeff() <= 1e-10);
    CHECK(dfe.residual <= 1e-10);
}

TEST_CASE("Zika small-diffusion profile approaches beta/mu") {
    const BuiltinModel zika = make_builtin("zika", {{"beta", "1 + 0.5*cos(pi*x)"}});
    const CompartmentModel model = zika.model.with_diffusion({1.0, 1.0, 1e-5});
    const Grid grid = model.make_grid(513);
    const DfeState dfe = solve_dfe(model, grid);
    const Eigen::MatrixXd c = dfe_small_limit(model, grid);
    const double dist = (dfe.values - c).cwiseAbs().maxCoeff();
    CHECK(dist <= 0.02 * c.maxCoeff());
    CHECK(dfe.residual <= 1e-10);
}

TEST_CASE("built-in DFE profiles approach both declared limits") {
    // Heterogeneous recruitment makes the DFE genuinely diffusion-dependent.
    const std::map<std::string, std::map<std::string, std::string>> overrides = {
        {"sis", {}},
        {"zika", {{"beta", "1 + 0.3*cos(pi*x)"}}},
        {"vector_host", {{"lambda1", "1 + 0.3*cos(pi*x)"}}},
        {"staged", {{"lambda", "1 + 0.3*cos(pi*x)"}}},
    };
    for (const auto& name : builtin_names()) {
        const BuiltinModel b = make_builtin(name, overrides.at(name));
        const int n = b.model.n();
        INFO("model ", name);
        {
            std::vector<double> d(static_cast<std::size_t>(n), 1.0);
            for (int i = b.model.m(); i < n; ++i)
                d[static_cast<std::size_t>(i)] = 1e-5;
            const CompartmentModel model = b.model.with_diffusion(d);
            const Grid grid = model.make_grid(257);
            const DfeState dfe = solve_dfe(model, grid);
            const Eigen::MatrixXd c = dfe_small_limit(model, grid);
            CHECK((dfe.values - c).cwiseAbs().maxCoeff() <= 0.02 * c.maxCoeff());
        }
        {
            std::vector<double> d(static_cast<std::size_t>(n), 1.0);
            for (int i = b.model.m(); i < n; ++i)
                d[static_cast<std::size_t>(i)] = 1e4;
            const CompartmentModel model = b.model.with_diffusion(d);
            const Grid grid = model.make_grid(257);
            const DfeState dfe = solve_dfe(model, grid);
            const Eigen::VectorXd u_tilde = dfe_large_limit(model, grid);
            double dist = 0.0;
            for (int i = 0; i < dfe.values.cols(); ++i)
                dist = std::max(dist, (dfe.values.col(i).array() - u_tilde[i]).abs().maxCoeff());
            CHECK(dist <= 1e-3);
        }
    }
}

TEST_CASE("declared small/large limits evaluate the published profiles") {
    {
        const BuiltinModel zika =
            make_builtin("zika", {{"beta", "1 + 0.5*cos(pi*x)"}, {"mu", "1"}});
        const Grid grid = zika.model.make_grid(129);
        const Eigen::MatrixXd c = dfe_small_limit(zika.model, grid);
        for (int k : {0, 64, 128})
            CHECK(c(k, 0) == doctest::Approx(1.0 + 0.5 * std::cos(M_PI * grid.node(k))));
        // integral of cos(pi x) vanishes, so u-tilde = 1
        const Grid fine = zika.model.make_grid(1025);
        CHECK(dfe_large_limit(zika.model, fine)[0] == doctest::Approx(1.0).epsilon(1e-6));
    }
    {
        const BuiltinModel staged = make_builtin("staged", {{"m", "2"}, {"lambda", "1 + x"}});
        const Grid grid = staged.model.make_grid(65);
        const Eigen::MatrixXd c = dfe_small_limit(staged.model, grid);
        for (int k : {0, 32, 64})
            CHECK(c(k, 0) == doctest::Approx(1.0 + grid.node(k)));
    }
    {
        const BuiltinModel staged =
            make_builtin("staged", {{"m", "2"}, {"lambda", "2 + cos(pi*x)"}});
        const Grid grid = staged.model.make_grid(1025);
        CHECK(dfe_large_limit(staged.model, grid)[0] == doctest::Approx(2.0).epsilon(1e-6));
    }
    {
        const BuiltinModel vh = make_builtin("vector_host", {{"lambda1", "2"}});
        const Grid grid = vh.model.make_grid(33);
        const Eigen::MatrixXd c = dfe_small_limit(vh.model, grid);
        CHECK(c(10, 0) == doctest::Approx(2.0)); // lambda1 / b
        CHECK(c(10, 1) == doctest::Approx(1.0)); // lambda2 / c
    }
}

TEST_CASE("models without declared limits raise explicit errors") {
    const Expr I = Expr::variable(1, "I");
    const Expr S = Expr::variable(2, "S");
    CompartmentModel::Setup s;
    s.names = {"I", "S"};
    s.n_infected = 1;
    s.diffusion = {1.0, 1.0};
    s.F = {S * I, Expr()};
    s.Vplus = {Expr(), Expr::constant(1.0)};
    s.Vminus = {I, S};
    const CompartmentModel model(std::move(s));
    const Grid grid = model.make_grid(17);
    CHECK_THROWS_AS(dfe_small_limit(model, grid), ValidationError);
    CHECK_THROWS_AS(dfe_large_limit(model, grid), ValidationError);
    // Newton still solves the DFE from the flat initial guess.
    const DfeState dfe = solve_dfe(model, grid);
    CHECK((dfe.values.col(0).array() - 1.0).abs().maxCoeff() <= 1e-10);
}

TEST_CASE("negative steady states are rejected") {
    // f_S = -(S + 1): the steady state would be S = -1.
    const Expr I = Expr::variable(1, "I");
    const Expr S = Expr::variable(2, "S");
    CompartmentModel::Setup s;
    s.names = {"I", "S"};
    s.n_infected = 1;
    s.diffusion = {1.0, 1.0};
    s.F = {Expr(), Expr()};
    s.Vplus = {Expr(), Expr()};
    s.Vminus = {I, S + Expr::constant(1.0)};
    const CompartmentModel model(std::move(s));
    const Grid grid = model.make_grid(17);
    CHECK_THROWS_AS(solve_dfe(model, grid), NumericalError);
}

TEST_CASE("prescribed DFE is verified against the steady equations") {
    const BuiltinModel sis = make_builtin("sis");
    const Grid grid = sis.model.make_grid(33);
    const DfeState dfe = solve_dfe(sis.model, grid);
    CHECK(dfe.method == "prescribed");
    CHECK(dfe.residual <= 1e-10);
    CHECK((dfe.values.col(0).array() - 1.0).abs().maxCoeff() == 0.0);
}

TEST_CASE("warm starts are accepted as initial guesses") {
    const BuiltinModel zika = make_builtin("zika", {{"beta", "1 + 0.5*cos(pi*x)"}});
    const Grid grid = zika.model.make_grid(65);
    const DfeState first = solve_dfe(zika.model, grid);
    const DfeState again = solve_dfe(zika.model, grid, 1e-10, &first.values);
    CHECK((first.values - again.values).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(again.iterations <= first.iterations);
}
