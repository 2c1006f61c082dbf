#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rdr0/dfe.hpp"
#include "rdr0/limits.hpp"
#include "rdr0/models.hpp"

using namespace rdr0;

TEST_CASE("SIS oracles at the published parameter choices") {
    const Grid grid(0.0, 1.0, 513);
    {
        const BuiltinModel m = make_builtin("sis", {{"beta", "2 + cos(pi*x)"}, {"gamma", "1"}});
        CHECK(m.small_oracle(grid) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(m.large_oracle(grid) == doctest::Approx(2.0).epsilon(1e-6));
    }
    {
        const BuiltinModel m =
            make_builtin("sis", {{"beta", "1.3 + 0.2*x"}, {"gamma", "1.3 + 0.2*x"}});
        CHECK(m.small_oracle(grid) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.large_oracle(grid) == doctest::Approx(1.0).epsilon(1e-12));
    }
    {
        const BuiltinModel m = make_builtin("sis", {{"beta", "2"}, {"gamma", "1"}});
        CHECK(m.small_oracle(grid) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(m.large_oracle(grid) == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("Zika oracles") {
    const Grid grid(0.0, 1.0, 513);
    {
        const BuiltinModel m = make_builtin("zika"); // all-ones, Hu = 2
        CHECK(m.small_oracle(grid) == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(m.large_oracle(grid) == doctest::Approx(2.0).epsilon(1e-13));
    }
    {
        const BuiltinModel m = make_builtin("zika", {{"Hu", "1 + x"}});
        CHECK(m.small_oracle(grid) == doctest::Approx(2.0).epsilon(1e-12)); // max at x = 1
        CHECK(m.large_oracle(grid) == doctest::Approx(1.5).epsilon(1e-12)); // int(1+x) = 3/2
    }
    CHECK_THROWS_AS(make_builtin("zika", {{"sigma1", "0"}}), ValidationError);
}

TEST_CASE("vector-host oracles") {
    const Grid grid(0.0, 1.0, 513);
    {
        const BuiltinModel m = make_builtin("vector_host");
        CHECK(m.small_oracle(grid) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
        CHECK(m.large_oracle(grid) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
    }
    {
        const BuiltinModel m = make_builtin("vector_host", {{"lambda1", "2"}});
        // sqrt(lambda1 lambda2 beta_s beta_m / (b c^2 (b+gamma))) = sqrt(2/2) = 1
        CHECK(m.small_oracle(grid) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(m.large_oracle(grid) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("staged oracles") {
    const Grid grid(0.0, 1.0, 513);
    {
        const BuiltinModel m = make_builtin("staged", {{"m", "2"}, {"alpha", "0"}});
        CHECK(m.small_oracle(grid) == doctest::Approx(0.75).epsilon(1e-13));
        CHECK(m.large_oracle(grid) == doctest::Approx(0.75).epsilon(1e-13));
    }
    {
        // m = 1 reduces to beta1/(nu1+gamma1) * (lambda/b) h(lambda/b)
        const BuiltinModel m =
            make_builtin("staged", {{"m", "1"}, {"alpha", "0.5"}, {"lambda", "2"}});
        const double expected = 0.5 * 2.0 * std::pow(2.0, -0.5);
        CHECK(m.small_oracle(grid) == doctest::Approx(expected).epsilon(1e-13));
    }
    {
        // h(1) = 1 for every alpha: the oracle is alpha-independent at lambda = b
        const BuiltinModel a0 = make_builtin("staged", {{"m", "2"}, {"alpha", "0"}});
        const BuiltinModel a1 = make_builtin("staged", {{"m", "2"}, {"alpha", "1"}});
        CHECK(a0.small_oracle(grid) == doctest::Approx(a1.small_oracle(grid)).epsilon(1e-14));
    }
}

namespace {

BuiltinModel random_builtin(const std::string& name, std::mt19937_64& rng) {
    auto coeff = [&rng] { return testing::random_positive_coefficient(rng); };
    if (name == "sis")
        return make_sis(coeff(), coeff(), 1.0);
    if (name == "zika")
        return make_zika({coeff(), coeff(), coeff(), coeff(), coeff(), coeff()});
    if (name == "vector_host")
        return make_vector_host({coeff(), coeff(), coeff(), coeff(), coeff(), coeff(), coeff()});
    // staged with m = 3 and a nontrivial saturation exponent
    StagedParams p;
    for (int j = 0; j < 3; ++j) {
        p.beta.push_back(coeff());
        p.nu.push_back(coeff());
        p.gamma.push_back(coeff());
    }
    p.lambda = coeff();
    p.b = coeff();
    return make_staged(3, p, 0.4);
}

} // namespace

TEST_CASE("oracle identity: profile and averaged limits match the closed forms") {
    // The same formulas computed two ways: symbolic Jacobians + dense
    // spectral radius versus the published closed-form algebra.
    std::mt19937_64 rng(424242);
    const Grid grid(0.0, 1.0, 257);
    for (const auto& name : builtin_names()) {
        for (int trial = 0; trial < 5; ++trial) {
            const BuiltinModel b = random_builtin(name, rng);
            const LocalProfile profile = local_R0_profile(b.model, grid);
            const double small = b.small_oracle(grid);
            INFO("model ", name, " trial ", trial);
            CHECK(std::abs(profile.max_value - small) <= 1e-10 * std::max(1.0, small));
            const double avg = averaged_limit(b.model, grid).value;
            const double large = b.large_oracle(grid);
            CHECK(std::abs(avg - large) <= 1e-10 * std::max(1.0, large));
            // pointwise too, at a few nodes
            for (int k : {0, 100, 256})
                CHECK(std::abs(profile.values[k] - b.local_oracle(grid.node(k))) <=
                      1e-10 * std::max(1.0, profile.values[k]));
        }
    }
}

TEST_CASE("staged integrated V inverse matches the published entries") {
    // Vcheck^-1 is lower triangular with 1/int(nu_i+gamma_i) on the diagonal
    // and prod int(nu_k) / prod int(nu_k+gamma_k) below it.
    std::mt19937_64 rng(777);
    const Grid grid(0.0, 1.0, 257);
    for (int m : {2, 3, 5}) {
        StagedParams p;
        for (int j = 0; j < m; ++j) {
            p.beta.push_back(testing::random_positive_coefficient(rng));
            p.nu.push_back(testing::random_positive_coefficient(rng));
            p.gamma.push_back(testing::random_positive_coefficient(rng));
        }
        p.lambda = testing::random_positive_coefficient(rng);
        p.b = testing::random_positive_coefficient(rng);
        const BuiltinModel staged = make_staged(m, p, 0.0);

        // integrated V at the constant large-diffusion profile
        const Eigen::VectorXd u_tilde = dfe_large_limit(staged.model, grid);
        std::vector<double> state(static_cast<std::size_t>(m + 1), 0.0);
        state[static_cast<std::size_t>(m)] = u_tilde[0];
        Eigen::MatrixXd Vc = Eigen::MatrixXd::Zero(m, m);
        const Field w = grid.trapezoid_weights();
        for (int k = 0; k < grid.n(); ++k)
            Vc += w[k] * jacobians_at(staged.model, grid.node(k), state).V;
        const Eigen::MatrixXd Vinv = Vc.inverse();

        std::vector<double> int_nu(static_cast<std::size_t>(m)), int_ng(static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            int_nu[static_cast<std::size_t>(j)] =
                integrate(grid, grid.sample([&](double x) { return p.nu[static_cast<std::size_t>(j)].evaluate(x, {}); }));
            int_ng[static_cast<std::size_t>(j)] = integrate(grid, grid.sample([&](double x) {
                return p.nu[static_cast<std::size_t>(j)].evaluate(x, {}) +
                       p.gamma[static_cast<std::size_t>(j)].evaluate(x, {});
            }));
        }
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                double expected = 0.0;
                if (j == i) {
                    expected = 1.0 / int_ng[static_cast<std::size_t>(i)];
                } else if (j < i) {
                    expected = 1.0;
                    for (int k = j; k < i; ++k)
                        expected *= int_nu[static_cast<std::size_t>(k)];
                    for (int k = j; k <= i; ++k)
                        expected /= int_ng[static_cast<std::size_t>(k)];
                }
                CHECK(std::abs(Vinv(i, j) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
            }
        }
    }
}

TEST_CASE("builtin parameter plumbing rejects unknown names") {
    CHECK_THROWS_AS(make_builtin("sis", {{"nonsense", "1"}}), ValidationError);
    CHECK_THROWS_AS(make_builtin("unknown_model"), ValidationError);
    CHECK_THROWS_AS(make_builtin("staged", {{"alpha", "2"}}), ValidationError);
    CHECK_THROWS_AS(make_builtin("sis", {{"Ntotal", "-1"}}), ValidationError);
}
