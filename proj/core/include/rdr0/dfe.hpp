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
#ifndef RDR0_DFE_HPP
#define RDR0_DFE_HPP

#include <Eigen/Core>
#include <optional>
#include <string>

#include "rdr0/grid.hpp"
#include "rdr0/model.hpp"

namespace rdr0 {

/// Disease-free steady state: positive uninfected profiles, zero infected.
struct DfeState {
    /// One column per uninfected compartment, one row per grid node.
    Eigen::MatrixXd values;
    /// Achieved sup-norm residual of d_S*Lap(u) + f_S(x,(0,u)).
    double residual = 0.0;
    /// Representation-noise floor of that residual: evaluating the discrete
    /// Laplacian of the rounded solution costs ~ eps * ||u|| * d/h^2, so
    /// convergence targets max(tol, floor).
    double residual_floor = 0.0;
    int iterations = 0;
    std::string method;
};

/// Solve the uninfected steady subsystem d_S*Lap(u) + f_S(x,(0,u)) = 0 by
/// damped Newton (warm-started from c(x) or `initial`), with an
/// implicit-Euler pseudo-time fallback and Newton restart. Models with a
/// prescribed DFE (conserved-mass SIS) evaluate it directly and verify the
/// residual. Fails on non-convergence (naming the worst residual node) or
/// on a positivity violation.
DfeState solve_dfe(const CompartmentModel& model, const Grid& grid, double tol = 1e-10,
                   const Eigen::MatrixXd* initial = nullptr);

/// Small-diffusion DFE profile c(x) (one column per uninfected compartment).
/// Errors when the model does not declare it.
Eigen::MatrixXd dfe_small_limit(const CompartmentModel& model, const Grid& grid);

/// Large-diffusion DFE constants (one per uninfected compartment), each a
/// ratio of trapezoid integrals. Errors when the model does not declare it.
Eigen::VectorXd dfe_large_limit(const CompartmentModel& model, const Grid& grid);

} // namespace rdr0

#endif
