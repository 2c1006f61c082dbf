#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rdr0/models.hpp"
#include "rdr0/r0.hpp"

using namespace rdr0;

namespace {

BlockOperator constant_operator(const Grid& grid, double d, double V, double F) {
    std::vector<Eigen::MatrixXd> V_nodes(static_cast<std::size_t>(grid.n()),
                                         Eigen::MatrixXd::Constant(1, 1, V));
    std::vector<Eigen::MatrixXd> F_nodes(static_cast<std::size_t>(grid.n()),
                                         Eigen::MatrixXd::Constant(1, 1, F));
    Eigen::VectorXd dI(1);
    dI << d;
    return BlockOperator(grid, dI, V_nodes, F_nodes);
}

} // namespace

TEST_CASE("SIS assembly: B = d Lap - diag(gamma), F = diag(beta S)") {
    const BuiltinModel sis =
        make_builtin("sis", {{"beta", "2 + cos(pi*x)"}, {"gamma", "1 + 0.25*x"}});
    const Grid grid = sis.model.make_grid(33);
    const DfeState dfe = solve_dfe(sis.model, grid);
    const BlockOperator op(sis.model, grid, dfe);
    const SparseMatrix L = laplacian(grid, 1.0);
    const Eigen::MatrixXd B = Eigen::MatrixXd(op.B());
    const Eigen::MatrixXd Ld = Eigen::MatrixXd(L);
    for (int k : {0, 5, 16, 32}) {
        const double gamma = 1.0 + 0.25 * grid.node(k);
        CHECK(B(k, k) == doctest::Approx(Ld(k, k) - gamma).epsilon(1e-14));
        const double beta = 2.0 + std::cos(M_PI * grid.node(k));
        CHECK(op.F_nodes()[static_cast<std::size_t>(k)](0, 0) ==
              doctest::Approx(beta * 1.0)); // S_hat = 1
    }
    // cooperativity of the off-diagonal part
    for (int k = 0; k < op.B().outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op.B(), k); it; ++it)
            if (it.row() != it.col())
                CHECK(it.value() >= 0.0);
}

TEST_CASE("decoupled constant operator: B = d Lap - I, F = 0") {
    const Grid grid(0.0, 1.0, 33);
    const BlockOperator op = constant_operator(grid, 1.0, 1.0, 0.0);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.dim());
    CHECK(((op.B() * ones).array() + 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(op.apply_F(ones).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("solve_block_system on constants and random right-hand sides") {
    const Grid grid(0.0, 1.0, 33);
    const BlockOperator op = constant_operator(grid, 1.0, 1.0, 0.0);
    const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(op.dim());
    const Eigen::VectorXd z = op.solve_B(rhs);
    CHECK((z.array() + 1.0).abs().maxCoeff() <= 1e-12);

    // random rhs residual check at N = 64, m = 2 (zika blocks)
    const BuiltinModel zika = make_builtin("zika");
    const Grid g64 = zika.model.make_grid(64);
    const DfeState dfe = solve_dfe(zika.model, g64);
    const BlockOperator zop(zika.model, g64, dfe);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd b(zop.dim());
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b[i] = dist(rng);
        const Eigen::VectorXd x = zop.solve_B(b);
        const double rel = (zop.B() * x - b).lpNorm<Eigen::Infinity>() /
                           b.lpNorm<Eigen::Infinity>();
        CHECK(rel <= 1e-10);
    }
}

TEST_CASE("resolvent positivity: -B^-1 maps nonnegative data to nonnegative data") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (const auto& name : builtin_names()) {
        const BuiltinModel b = make_builtin(name);
        const Grid grid = b.model.make_grid(33);
        const DfeState dfe = solve_dfe(b.model, grid);
        const BlockOperator op(b.model, grid, dfe);
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::VectorXd rhs(op.dim());
            for (Eigen::Index i = 0; i < rhs.size(); ++i)
                rhs[i] = dist(rng);
            const Eigen::VectorXd z = -op.solve_B(rhs);
            CHECK(z.minCoeff() >= -1e-12);
        }
    }
}

TEST_CASE("constant-coefficient SIS has R0 = beta/gamma at every diffusion") {
    const BuiltinModel sis = make_builtin("sis", {{"beta", "2"}, {"gamma", "1"}});
    for (double d : {1e-3, 1.0, 1e3}) {
        const CompartmentModel model = sis.model.with_diffusion({d, d});
        const Grid grid = model.make_grid(65);
        const DfeState dfe = solve_dfe(model, grid);
        const SpectralResult r0 = compute_R0(model, grid, dfe, 1e-12);
        CHECK(std::abs(r0.value - 2.0) <= 1e-10);
    }
}

TEST_CASE("large-diffusion SIS approaches the integral ratio") {
    const BuiltinModel sis = make_builtin("sis", {{"beta", "2 + cos(pi*x)"}, {"gamma", "1"}});
    const CompartmentModel model = sis.model.with_diffusion({1e3, 1e3});
    const Grid grid = model.make_grid(2049);
    const DfeState dfe = solve_dfe(model, grid);
    const SpectralResult r0 = compute_R0(model, grid, dfe, 1e-10);
    CHECK(std::abs(r0.value - 2.0) <= 1e-2);
}

TEST_CASE("power iteration matches the dense next-generation eigendecomposition") {
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 5; ++trial) {
        ZikaParams p{testing::random_positive_coefficient(rng),
                     testing::random_positive_coefficient(rng),
                     testing::random_positive_coefficient(rng),
                     testing::random_positive_coefficient(rng),
                     testing::random_positive_coefficient(rng),
                     testing::random_positive_coefficient(rng)};
        const BuiltinModel zika = make_zika(p);
        const Grid grid = zika.model.make_grid(32);
        const DfeState dfe = solve_dfe(zika.model, grid);
        const BlockOperator op(zika.model, grid, dfe);
        const double mine = compute_R0(op, 1e-12).value;
        const double oracle = testing::dense_spectral_radius(testing::dense_next_generation(op));
        CHECK(std::abs(mine - oracle) <= 1e-8 * oracle);
    }
}

TEST_CASE("sign relation between R0 - 1 and s(B+F)") {
    {
        const BuiltinModel sis = make_builtin("sis", {{"beta", "2"}, {"gamma", "1"}});
        const Grid grid = sis.model.make_grid(65);
        const DfeState dfe = solve_dfe(sis.model, grid);
        const SignCheckReport rep = sign_check(sis.model, grid, dfe, 1e-10);
        CHECK(rep.R0 == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(rep.s_B_plus_F == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(rep.agree);
        CHECK_FALSE(rep.near_threshold);
    }
    {
        const BuiltinModel sis = make_builtin("sis", {{"beta", "0.5"}, {"gamma", "1"}});
        const Grid grid = sis.model.make_grid(65);
        const DfeState dfe = solve_dfe(sis.model, grid);
        const SignCheckReport rep = sign_check(sis.model, grid, dfe, 1e-10);
        CHECK(rep.R0 == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(rep.s_B_plus_F == doctest::Approx(-0.5).epsilon(1e-7));
        CHECK(rep.agree);
    }
    {
        // heterogeneous sweep: signs agree at every point
        const BuiltinModel sis =
            make_builtin("sis", {{"beta", "2 + cos(pi*x)"}, {"gamma", "2"}});
        for (double d : {1e-4, 1e-2, 1.0, 1e3}) {
            const CompartmentModel model = sis.model.with_diffusion({d, d});
            const Grid grid = model.make_grid(129);
            const DfeState dfe = solve_dfe(model, grid);
            const SignCheckReport rep = sign_check(model, grid, dfe, 1e-10);
            INFO("d = ", d, " R0 = ", rep.R0, " s = ", rep.s_B_plus_F);
            CHECK(rep.agree);
        }
    }
}

TEST_CASE("a non-dissipative transfer operator is refused") {
    // V = -1 (so -V = +1): s(B) = s(d Lap + 1) = 1 > 0.
    const Grid grid(0.0, 1.0, 17);
    const BlockOperator op = constant_operator(grid, 1.0, -1.0, 1.0);
    CHECK_THROWS_AS(compute_R0(op, 1e-10), NumericalError);
}

TEST_CASE("cooperativity violations in assembly name the node and entry") {
    const Grid grid(0.0, 1.0, 9);
    std::vector<Eigen::MatrixXd> V_nodes(9, (Eigen::MatrixXd(2, 2) << 1.0, 0.5, 0.0, 1.0).finished());
    std::vector<Eigen::MatrixXd> F_nodes(9, Eigen::MatrixXd::Zero(2, 2));
    Eigen::VectorXd d(2);
    d << 1.0, 1.0;
    // V(0,1) = +0.5 means -V has a negative off-diagonal: not cooperative.
    CHECK_THROWS_AS(BlockOperator(grid, d, V_nodes, F_nodes), ValidationError);
}

TEST_CASE("grid refinement converges at second order") {
    const BuiltinModel sis = make_builtin("sis", {{"beta", "2 + cos(pi*x)"}, {"gamma", "1"}});
    const CompartmentModel model = sis.model.with_diffusion({0.1, 0.1});
    double r[3];
    int idx = 0;
    for (int n : {65, 129, 257}) {
        const Grid grid = model.make_grid(n);
        const DfeState dfe = solve_dfe(model, grid);
        r[idx++] = compute_R0(model, grid, dfe, 1e-12).value;
    }
    const double e1 = std::abs(r[0] - r[1]);
    const double e2 = std::abs(r[1] - r[2]);
    // halving h divides the error by ~4
    CHECK(e1 / e2 > 2.5);
    CHECK(e1 / e2 < 6.0);
}
