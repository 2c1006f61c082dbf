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
#ifndef RDR0_SPECTRAL_HPP
#define RDR0_SPECTRAL_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>

#include "rdr0/errors.hpp"
#include "rdr0/grid.hpp"

namespace rdr0 {

struct SpectralResult {
    double value = 0.0;
    /// Eigenvector, sup-norm 1, sign fixed so the max-modulus entry is +1.
    Eigen::VectorXd vector;
    int iterations = 0;
    /// Eigenpair residual at eigenvalue scale (see the producing routine).
    double residual = 0.0;
    /// True when the iterates decayed to zero (spectral radius 0).
    bool decayed = false;
};

/// Non-convergence carrying the last Rayleigh estimate.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& msg, double estimate)
        : NumericalError(msg + " (last estimate " + std::to_string(estimate) + ")"),
          estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Spectral radius of an entrywise-nonnegative operator by power iteration
/// from the all-ones vector. The iteration runs on A + cI with
/// c = (max row sum)/2 > 0, which leaves r(A) = r(A + cI) - c unchanged for
/// nonnegative A and makes the Perron root strictly dominant even for
/// imprimitive matrices (e.g. antidiagonal next-generation blocks whose
/// spectrum is {+r, -r}). Residual is reported against A itself:
/// ||A v - r v||_inf with ||v||_inf = 1.
SpectralResult spectral_radius_nonneg(const LinearMap& apply, Eigen::Index dim, double tol,
                                      int max_iterations = 100000);
SpectralResult spectral_radius_nonneg(const Eigen::MatrixXd& A, double tol,
                                      int max_iterations = 100000);

/// Spectral bound s(A) of a dense cooperative matrix via the nonnegative
/// shift: s(A) = r(A + sigma I) - sigma with sigma = 1 + max_i |A_ii|.
/// `sigma_override` (> max_i -A_ii) substitutes a custom shift.
SpectralResult spectral_bound_cooperative(const Eigen::MatrixXd& A, double tol,
                                          double sigma_override = 0.0,
                                          int max_iterations = 100000);

/// Spectral bound of a large sparse cooperative operator (discretized
/// diffusion blocks). The dense shift recipe is numerically unusable here:
/// sigma ~ d/h^2 can exceed 1e12, which would demand ~sigma/gap power steps
/// and 1e-22 relative Rayleigh accuracy. Instead runs inverse power
/// iteration on (tau I - A)^-1 with tau above the cooperative row-sum bound
/// s(A) <= max_i sum_j A_ij, re-shifting adaptively. The reported residual
/// is the resolvent eigenpair residual mapped to eigenvalue scale,
/// ||K v - theta v||_inf / theta^2 with K = (tau I - A)^-1.
SpectralResult spectral_bound_sparse(const SparseMatrix& A, double tol,
                                     int max_iterations = 100000);

/// True iff the digraph with an edge i -> j whenever pattern(i, j) is true
/// (i != j) is strongly connected. A 1x1 pattern is irreducible.
bool is_irreducible(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& pattern);

} // namespace rdr0

#endif
