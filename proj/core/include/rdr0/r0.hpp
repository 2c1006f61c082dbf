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
#ifndef RDR0_R0_HPP
#define RDR0_R0_HPP

#include <Eigen/SparseLU>
#include <memory>
#include <vector>

#include "rdr0/dfe.hpp"
#include "rdr0/grid.hpp"
#include "rdr0/model.hpp"
#include "rdr0/spectral.hpp"

namespace rdr0 {

/// Discretization of B = d_I*Lap - V(x, u0(x)) on the infected block plus
/// the multiplication operator F(x, u0(x)), stored nodewise. Unknowns are
/// node-major (bandwidth m); B is factored once and the factorization is
/// reused by every solve. Off-diagonal entries of B are nonnegative
/// (cooperativity) and F is entrywise nonnegative; assembly refuses
/// violations beyond kCooperativityTol, naming the node and entry.
class BlockOperator {
public:
    /// Assemble from a model at its disease-free state.
    BlockOperator(const CompartmentModel& model, const Grid& grid, const DfeState& dfe);

    /// Assemble from explicit nodewise V and F matrices (tests, envelopes).
    BlockOperator(const Grid& grid, const Eigen::VectorXd& d_infected,
                  const std::vector<Eigen::MatrixXd>& V_nodes,
                  const std::vector<Eigen::MatrixXd>& F_nodes);

    int m() const { return m_; }
    int n_nodes() const { return n_nodes_; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(m_) * n_nodes_; }

    const SparseMatrix& B() const { return B_; }
    const std::vector<Eigen::MatrixXd>& F_nodes() const { return F_nodes_; }

    /// Sparse matrix of B + F (cooperative since F >= 0).
    SparseMatrix B_plus_F() const;

    /// y = F v (nodewise block multiply).
    Eigen::VectorXd apply_F(const Eigen::VectorXd& v) const;

    /// Solve B z = rhs using the cached factorization; iteratively refined
    /// to relative residual <= 1e-10 (error if unreachable).
    Eigen::VectorXd solve_B(const Eigen::VectorXd& rhs) const;

    /// One application of the next-generation operator, v -> -F B^-1 v.
    Eigen::VectorXd apply_next_generation(const Eigen::VectorXd& v) const;

private:
    void factorize();

    int m_ = 0;
    int n_nodes_ = 0;
    SparseMatrix B_;
    std::vector<Eigen::MatrixXd> F_nodes_;
    std::unique_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
};

/// R0 = r(-F(x,u0) B^-1) by power iteration on the cached factorization.
/// Checks s(B) < 0 first (else errors citing the cooperativity assumption).
SpectralResult compute_R0(const CompartmentModel& model, const Grid& grid, const DfeState& dfe,
                          double tol = 1e-10);
SpectralResult compute_R0(const BlockOperator& op, double tol = 1e-10);

struct SignCheckReport {
    double R0 = 0.0;
    double s_B_plus_F = 0.0;
    /// sign(R0 - 1) == sign(s(B+F)), meaningful only when not near threshold.
    bool agree = false;
    /// |R0 - 1| or |s(B+F)| below 1e-12: indeterminate comparison.
    bool near_threshold = false;
};

/// Verify that R0 - 1 and s(B + F) have the same sign.
SignCheckReport sign_check(const CompartmentModel& model, const Grid& grid, const DfeState& dfe,
                           double tol = 1e-10);

} // namespace rdr0

#endif
