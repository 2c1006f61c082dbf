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
#ifndef RDR0_LIMITS_HPP
#define RDR0_LIMITS_HPP

#include <string>
#include <utility>
#include <vector>

#include "rdr0/dfe.hpp"
#include "rdr0/model.hpp"
#include "rdr0/spectral.hpp"

namespace rdr0 {

/// Entrywise min/max of the Jacobian blocks V(x,u), F(x,u) over the grid
/// and an epsilon-box around a reference disease-free profile. Extrema are
/// sampled at the 2^(n-m) box corners plus the center per node, which is
/// exact for entries monotone or affine in each uninfected coordinate
/// (every built-in model; a documented limitation for non-monotone custom
/// reactions).
struct EnvelopeMatrices {
    double epsilon = 0.0;
    Eigen::MatrixXd Vlow, Vhigh, Flow, Fhigh; // global over all nodes
    // Nodewise envelopes (box centered at the reference profile of each node).
    std::vector<Eigen::MatrixXd> Vlow_x, Vhigh_x, Flow_x, Fhigh_x;
};

struct LocalProfile {
    Field values; // r(V^-1(x,c(x)) F(x,c(x))) per node
    double max_value = 0.0;
    int argmax_node = 0; // ties break to the lowest node index
};

/// Pointwise reproduction number at the small-diffusion profile c(x);
/// errors when V(x,c(x)) is singular or not dissipative at some node.
LocalProfile local_R0_profile(const CompartmentModel& model, const Grid& grid);

struct AveragedLimit {
    double value = 0.0;
    /// Dense full-spectrum verification that the Perron root is the unique
    /// eigenvalue with a nonnegative eigenvector (only for m <= 6).
    bool hypothesis_checked = false;
    bool hypothesis_ok = false;
    /// Power iteration needed unusually many steps (possible non-simple root).
    bool slow_convergence = false;
    std::string note;
};

/// Large-diffusion limit r(Vcheck^-1 Fcheck) from the spatially integrated
/// Jacobian blocks at the constant profile u-tilde.
AveragedLimit averaged_limit(const CompartmentModel& model, const Grid& grid);

/// Envelopes over the epsilon-box around `reference` (grid-nodes rows, one
/// column per uninfected compartment). Requires eps < min reference value.
EnvelopeMatrices envelopes(const CompartmentModel& model, const Grid& grid,
                           const Eigen::MatrixXd& reference, double eps);

/// Step-1 bounds: low = r(Vhigh^-1 Flow), high = r(Vlow^-1 Fhigh).
/// Requires s(-Vhigh) < 0 and s(-Vlow) < 0 (errors otherwise).
std::pair<double, double> envelope_bounds(const EnvelopeMatrices& env);

/// Principal eigenvalue of d_I Lap - Vlow^x + a Fhigh^x assembled from the
/// nodewise envelopes around c(x); strictly increasing in a wherever the
/// pattern is irreducible.
SpectralResult auxiliary_lambda(const CompartmentModel& model, const Grid& grid, double a,
                                double eps);

struct SweepPoint {
    std::vector<double> diffusion; // full n-tuple
    double R0 = 0.0;
    double s_B_plus_F = 0.0;
    double dfe_residual = 0.0;
    int r0_iterations = 0;
    bool in_small_box = false; // DFE within eps of c(x) nodewise
    bool in_large_box = false; // DFE within eps of u-tilde nodewise
    bool has_envelope = false;
    double envelope_low = 0.0, envelope_high = 0.0;
    bool failed = false;
    std::string error;
};

struct LimitReport {
    std::vector<SweepPoint> sweep;
    bool has_small_limit = false, has_large_limit = false;
    double small_limit = 0.0; // max_x r(V^-1(x,c(x)) F(x,c(x)))
    double large_limit = 0.0; // r(Vcheck^-1 Fcheck)
    LocalProfile profile;
    AveragedLimit averaged;
    double eps_small = 0.0, eps_large = 0.0;
    bool has_small_bounds = false, has_large_bounds = false;
    std::pair<double, double> small_bounds{0.0, 0.0};
    std::pair<double, double> large_bounds{0.0, 0.0};
    /// Numerically observed violation of averaged <= max local (flag only).
    bool limit_order_violated = false;
};

struct SweepOptions {
    double tol = 1e-10;
    /// Envelope half-width as a fraction of the minimum reference value.
    double eps_fraction = 0.05;
    int jobs = 1;
};

/// Diffusion sweep: per tuple, re-solve the DFE, compute R0 and s(B+F),
/// test epsilon-box membership and record the matching envelope bounds.
/// Per-point failures are recorded in the report, not fatal. Points are
/// independent and may run on `jobs` threads; the report is assembled in
/// schedule order either way.
LimitReport sweep(const CompartmentModel& model, const Grid& grid,
                  const std::vector<std::vector<double>>& schedule,
                  const SweepOptions& options = {});

} // namespace rdr0

#endif
