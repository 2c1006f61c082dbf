/*
* Copyright (C) 2026 rdr0 contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef RDR0_MODEL_HPP
#define RDR0_MODEL_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rdr0/expr.hpp"
#include "rdr0/grid.hpp"

namespace rdr0 {

/// Off-diagonal tolerance for cooperativity / positivity checks.
inline constexpr double kCooperativityTol = 1e-12;

/// Compartmental reaction-diffusion model with its F / V+ / V- reaction
/// decomposition. Infected compartments come first (indices 0..m-1).
/// Immutable after construction; all evaluation is pure.
class CompartmentModel {
public:
    struct Setup {
        std::vector<std::string> names; // infected first
        int n_infected = 0;
        std::vector<double> diffusion;
        double domain_a = 0.0;
        double domain_b = 1.0;
        // Reaction pieces, one expression per compartment over the
        // vocabulary (x, names...): new infections, transfer in, transfer out.
        std::vector<Expr> F, Vplus, Vminus;
        // Optional prescribed disease-free steady state (uninfected rows),
        // for models whose steady equations are degenerate (conserved mass).
        std::vector<Expr> dfe_fixed;
        // Optional small-diffusion profile c(x) of the DFE, uninfected rows.
        std::vector<Expr> dfe_small;
        // Optional large-diffusion constants as ratios of integrals
        // (numerator integrand, denominator integrand), uninfected rows.
        std::vector<std::pair<Expr, Expr>> dfe_large;
        // Lower sampling bounds per compartment for assumption spot-checks
        // (used to stay inside the evaluable region, e.g. N > 0).
        std::vector<double> sample_floor;
    };

    explicit CompartmentModel(Setup setup);

    int n() const { return static_cast<int>(setup_.names.size()); }
    int m() const { return setup_.n_infected; }
    const std::vector<std::string>& names() const { return setup_.names; }
    const std::vector<double>& diffusion() const { return setup_.diffusion; }
    double domain_a() const { return setup_.domain_a; }
    double domain_b() const { return setup_.domain_b; }
    Grid make_grid(int n_nodes) const { return Grid(setup_.domain_a, setup_.domain_b, n_nodes); }

    const std::vector<std::string>& vocabulary() const { return vocabulary_; }

    const Expr& F_expr(int i) const { return setup_.F[i]; }
    const Expr& Vplus_expr(int i) const { return setup_.Vplus[i]; }
    const Expr& Vminus_expr(int i) const { return setup_.Vminus[i]; }
    /// Full reaction f_i = F_i - (Vminus_i - Vplus_i).
    const Expr& f_expr(int i) const { return f_[i]; }

    /// Symbolic Jacobian entries (precomputed): dF(i,j) = dF_i/du_j etc.
    const Expr& dF(int i, int j) const { return dF_[idx(i, j)]; }
    const Expr& dV(int i, int j) const { return dV_[idx(i, j)]; }
    const Expr& df(int i, int j) const { return df_[idx(i, j)]; }

    bool has_dfe_fixed() const { return !setup_.dfe_fixed.empty(); }
    bool has_dfe_small() const { return !setup_.dfe_small.empty(); }
    bool has_dfe_large() const { return !setup_.dfe_large.empty(); }
    const std::vector<Expr>& dfe_fixed() const { return setup_.dfe_fixed; }
    const std::vector<Expr>& dfe_small() const { return setup_.dfe_small; }
    const std::vector<std::pair<Expr, Expr>>& dfe_large() const { return setup_.dfe_large; }
    const std::vector<double>& sample_floor() const { return floor_; }

    /// Copy with different diffusion rates (sweeps vary these).
    CompartmentModel with_diffusion(const std::vector<double>& d) const;

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n()) +
               static_cast<std::size_t>(j);
    }

    Setup setup_;
    std::vector<std::string> vocabulary_;
    std::vector<Expr> f_;
    std::vector<Expr> dF_, dV_, df_; // n*n row-major tables
    std::vector<double> floor_;
};

/// Jacobian blocks of the reaction terms at one point:
/// F_ij = dF_i/du_j and V_ij = dV_i/du_j on the infected block (m x m),
/// M_ij = df_{i+m}/du_{j+m} on the uninfected block.
struct JacobianSample {
    double x = 0.0;
    Eigen::MatrixXd F, V, M;
};

/// Evaluate the Jacobian blocks at (x, u); u is the full n-state.
/// Expression domain violations are rethrown with the entry attached.
JacobianSample jacobians_at(const CompartmentModel& model, double x,
                            std::span<const double> u);

struct AssumptionCheck {
    std::string name;
    bool passed = true;
    std::string detail; // worst violating sample, empty when passed
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed)
                return false;
        return true;
    }
    /// Cooperativity of -V and nodewise s(-V) < 0; R0 refuses to run
    /// without these.
    bool spectral_preconditions_ok = true;
    std::string summary() const;
};

/// Verify the structural assumptions at the disease-free state:
/// sampled nonnegativity of the reaction pieces, the u_i = 0 transfer-out
/// slices, structural zeros of F below the infected block, vanishing of
/// F and V+ on disease-free states, cooperativity of M and -V at u0(x)
/// with nodewise spectral bounds, positivity of F, and nodewise strong
/// connectivity of the (-V off-diagonal) | F sparsity pattern (which is
/// independent of a > 0).
/// `dfe_values` holds the uninfected profiles, one column per uninfected
/// compartment, one row per grid node.
AssumptionReport check_assumptions(const CompartmentModel& model, const Grid& grid,
                                   const Eigen::MatrixXd& dfe_values, int sample_count = 20,
                                   unsigned seed = 20260412);

/// Full state at a node from uninfected profiles: (0,...,0, dfe row).
std::vector<double> disease_free_state(const CompartmentModel& model,
                                       const Eigen::MatrixXd& dfe_values, int node);

} // namespace rdr0

#endif
