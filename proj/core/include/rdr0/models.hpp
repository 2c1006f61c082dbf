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
#ifndef RDR0_MODELS_HPP
#define RDR0_MODELS_HPP

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rdr0/model.hpp"

namespace rdr0 {

/// A built-in model plus closed-form oracle formulas for its two
/// diffusion limits. The oracles evaluate the published limit expressions
/// directly from the coefficient functions (max / trapezoid integrals) and
/// share nothing with the Jacobian/spectral machinery they cross-check.
struct BuiltinModel {
    std::string name;
    CompartmentModel model;
    /// Pointwise local reproduction number, closed form.
    std::function<double(double x)> local_oracle;
    /// max over grid nodes of local_oracle.
    std::function<double(const Grid&)> small_oracle;
    /// Ratio-of-integrals limit, closed form, trapezoid quadrature.
    std::function<double(const Grid&)> large_oracle;
};

/// SIS with transmission beta(x) and removal gamma(x); conserved total
/// population Ntotal fixes the disease-free state S = Ntotal/(b-a).
/// Oracles: max beta*S/gamma and S * int(beta)/int(gamma).
BuiltinModel make_sis(const Expr& beta, const Expr& gamma, double Ntotal,
                      std::array<double, 2> diffusion = {1.0, 1.0}, double a = 0.0,
                      double b = 1.0);

struct ZikaParams {
    Expr lambda, sigma1, sigma2, mu, beta, Hu;
};

/// Host-vector Zika model (infected hosts, infected vectors, uninfected
/// vectors). Oracles: max sigma1*sigma2*Hu/(lambda*mu) and
/// (int sigma1*Hu * int sigma2)/(int lambda * int mu).
BuiltinModel make_zika(const ZikaParams& p, std::array<double, 3> diffusion = {1.0, 1.0, 1.0},
                       double a = 0.0, double b = 1.0);

struct VectorHostParams {
    Expr lambda1, lambda2, beta_s, beta_m, b, gamma, c;
};

/// Four-compartment vector-host model; oracles are the square-root
/// formulas sqrt(lambda1*lambda2*beta_s*beta_m / (b*c^2*(b+gamma))),
/// pointwise and with every factor integrated.
BuiltinModel make_vector_host(const VectorHostParams& p,
                              std::array<double, 4> diffusion = {1.0, 1.0, 1.0, 1.0},
                              double a = 0.0, double b = 1.0);

struct StagedParams {
    std::vector<Expr> beta;  // stage infectivities, size m
    std::vector<Expr> nu;    // stage progression rates, size m
    std::vector<Expr> gamma; // stage removal rates, size m
    Expr lambda, b;          // susceptible recruitment and mortality
};

/// Staged progression model with m infected stages, incidence
/// h(N) * sum_k beta_k S I_k, h(N) = N^-alpha, alpha in [0, 1].
/// Evaluation requires N > 0 for alpha > 0 (h is singular at N = 0); the
/// model's sampling floor keeps spot-checks inside that region.
/// Oracles: (sum_j beta_j prod_{k<j} nu_k / prod_{k<=j}(nu_k+gamma_k)) *
/// (lambda/b) h(lambda/b), pointwise and with every factor integrated.
BuiltinModel make_staged(int m, const StagedParams& p, double alpha,
                         std::vector<double> diffusion = {}, double a = 0.0, double b = 1.0);

/// Built-in by name ("sis", "zika", "vector_host", "staged") with curated
/// default coefficients; `overrides` replaces named coefficients with
/// parsed expressions of x (plus "Ntotal"/"alpha"/"m" scalars where they
/// apply).
BuiltinModel make_builtin(const std::string& name,
                          const std::map<std::string, std::string>& overrides = {});

/// Names accepted by make_builtin.
std::vector<std::string> builtin_names();

} // namespace rdr0

#endif
