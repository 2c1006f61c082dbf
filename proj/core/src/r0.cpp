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
#include "rdr0/r0.hpp"

#include <cmath>
#include <sstream>

#include "rdr0/block_assembly.hpp"

namespace rdr0 {

namespace {

// Validate and clean one node's V and F: -V off-diagonals and all of F must
// be nonnegative up to kCooperativityTol; rounding-level negatives clamp to 0.
void sanitize_node(Eigen::MatrixXd& V, Eigen::MatrixXd& F, int node) {
    const int m = static_cast<int>(V.rows());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i != j) {
                const double off = -V(i, j);
                if (off < -kCooperativityTol) {
                    std::ostringstream os;
                    os << "cooperativity violation in -V at node " << node << ", entry (" << i + 1
                       << "," << j + 1 << "): " << off;
                    throw ValidationError(os.str());
                }
                if (off < 0.0)
                    V(i, j) = 0.0;
            }
            if (F(i, j) < -kCooperativityTol) {
                std::ostringstream os;
                os << "negative F entry at node " << node << ", entry (" << i + 1 << "," << j + 1
                   << "): " << F(i, j);
                throw ValidationError(os.str());
            }
            if (F(i, j) < 0.0)
                F(i, j) = 0.0;
        }
}

} // namespace

BlockOperator::BlockOperator(const CompartmentModel& model, const Grid& grid, const DfeState& dfe)
    : m_(model.m()), n_nodes_(grid.n()) {
    std::vector<Eigen::MatrixXd> V_nodes(static_cast<std::size_t>(n_nodes_));
    F_nodes_.resize(static_cast<std::size_t>(n_nodes_));
    for (int k = 0; k < n_nodes_; ++k) {
        const auto u = disease_free_state(model, dfe.values, k);
        JacobianSample jac = jacobians_at(model, grid.node(k), u);
        sanitize_node(jac.V, jac.F, k);
        V_nodes[static_cast<std::size_t>(k)] = std::move(jac.V);
        F_nodes_[static_cast<std::size_t>(k)] = std::move(jac.F);
    }
    Eigen::VectorXd dI(m_);
    for (int i = 0; i < m_; ++i)
        dI[i] = model.diffusion()[static_cast<std::size_t>(i)];
    B_ = assemble_reaction_diffusion(
        grid, dI, [&](int k) { return (-V_nodes[static_cast<std::size_t>(k)]).eval(); });
    factorize();
}

BlockOperator::BlockOperator(const Grid& grid, const Eigen::VectorXd& d_infected,
                             const std::vector<Eigen::MatrixXd>& V_nodes,
                             const std::vector<Eigen::MatrixXd>& F_nodes)
    : m_(static_cast<int>(d_infected.size())), n_nodes_(grid.n()), F_nodes_(F_nodes) {
    if (static_cast<int>(V_nodes.size()) != n_nodes_ ||
        static_cast<int>(F_nodes_.size()) != n_nodes_)
        throw ValidationError("need one V and one F matrix per grid node");
    std::vector<Eigen::MatrixXd> V_clean = V_nodes;
    for (int k = 0; k < n_nodes_; ++k)
        sanitize_node(V_clean[static_cast<std::size_t>(k)], F_nodes_[static_cast<std::size_t>(k)],
                      k);
    B_ = assemble_reaction_diffusion(
        grid, d_infected, [&](int k) { return (-V_clean[static_cast<std::size_t>(k)]).eval(); });
    factorize();
}

void BlockOperator::factorize() {
    lu_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    lu_->compute(B_);
    if (lu_->info() != Eigen::Success)
        throw NumericalError(
            "factorization of B failed (singular operator: s(B) >= 0 or assembly bug)");
}

SparseMatrix BlockOperator::B_plus_F() const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_nodes_) * m_ * m_);
    for (int k = 0; k < n_nodes_; ++k) {
        const Eigen::MatrixXd& F = F_nodes_[static_cast<std::size_t>(k)];
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j)
                if (F(i, j) != 0.0)
                    trip.emplace_back(block_index(k, i, m_), block_index(k, j, m_), F(i, j));
    }
    SparseMatrix Fs(dim(), dim());
    Fs.setFromTriplets(trip.begin(), trip.end());
    SparseMatrix out = B_ + Fs;
    out.makeCompressed();
    return out;
}

Eigen::VectorXd BlockOperator::apply_F(const Eigen::VectorXd& v) const {
    if (v.size() != dim())
        throw ValidationError("block vector has the wrong size");
    Eigen::VectorXd y(dim());
    for (int k = 0; k < n_nodes_; ++k) {
        const Eigen::MatrixXd& F = F_nodes_[static_cast<std::size_t>(k)];
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int j = 0; j < m_; ++j)
                s += F(i, j) * v[block_index(k, j, m_)];
            y[block_index(k, i, m_)] = s;
        }
    }
    return y;
}

Eigen::VectorXd BlockOperator::solve_B(const Eigen::VectorXd& rhs) const {
    if (rhs.size() != dim())
        throw ValidationError("block vector has the wrong size");
    Eigen::VectorXd z = lu_->solve(rhs);
    const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
    if (rhs_norm == 0.0)
        return z;
    for (int refine = 0; refine < 3; ++refine) {
        const Eigen::VectorXd r = B_ * z - rhs;
        if (r.lpNorm<Eigen::Infinity>() <= 1e-10 * rhs_norm)
            return z;
        z -= lu_->solve(r);
    }
    const double rel = (B_ * z - rhs).lpNorm<Eigen::Infinity>() / rhs_norm;
    if (rel > 1e-10)
        throw NumericalError("block solve residual " + std::to_string(rel) +
                             " exceeds 1e-10 (near-singular B)");
    return z;
}

Eigen::VectorXd BlockOperator::apply_next_generation(const Eigen::VectorXd& v) const {
    return -apply_F(lu_->solve(v));
}

SpectralResult compute_R0(const BlockOperator& op, double tol) {
    const SpectralResult sB = spectral_bound_sparse(op.B(), std::min(1e-9, tol));
    if (!(sB.value < 0.0))
        throw NumericalError(
            "s(B) = " + std::to_string(sB.value) +
            " >= 0: the cooperative transfer operator is not dissipative (assumption (A6))");
    return spectral_radius_nonneg(
        [&op](const Eigen::VectorXd& v) { return op.apply_next_generation(v); }, op.dim(), tol);
}

SpectralResult compute_R0(const CompartmentModel& model, const Grid& grid, const DfeState& dfe,
                          double tol) {
    BlockOperator op(model, grid, dfe);
    return compute_R0(op, tol);
}

SignCheckReport sign_check(const CompartmentModel& model, const Grid& grid, const DfeState& dfe,
                           double tol) {
    BlockOperator op(model, grid, dfe);
    SignCheckReport report;
    report.R0 = compute_R0(op, tol).value;
    report.s_B_plus_F = spectral_bound_sparse(op.B_plus_F(), tol).value;
    const double lhs = report.R0 - 1.0;
    report.near_threshold = std::abs(lhs) < 1e-12 || std::abs(report.s_B_plus_F) < 1e-12;
    report.agree = report.near_threshold || (lhs > 0.0) == (report.s_B_plus_F > 0.0);
    return report;
}

} // namespace rdr0
