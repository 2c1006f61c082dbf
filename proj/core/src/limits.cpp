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
#include "rdr0/limits.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "rdr0/block_assembly.hpp"
#include "rdr0/r0.hpp"

namespace rdr0 {

namespace {

// Clamp rounding-level negatives so nonnegativity-checked routines accept
// M-matrix inverses and their products.
void clamp_tiny_negatives(Eigen::MatrixXd& A) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (A(i, j) < -kCooperativityTol)
                return; // genuine violation; leave for the caller's check
            if (A(i, j) < 0.0)
                A(i, j) = 0.0;
        }
}

// r(V^-1 F) for one dense dissipative block; `where` names the site in errors.
double local_spectral_radius(const Eigen::MatrixXd& V, const Eigen::MatrixXd& F,
                             const std::string& where) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
    if (!lu.isInvertible())
        throw NumericalError("singular V " + where);
    Eigen::MatrixXd K = lu.solve(F);
    clamp_tiny_negatives(K);
    if (K.minCoeff() < 0.0)
        throw NumericalError("V^-1 F has negative entries " + where +
                             " (V is not an M-matrix there)");
    return spectral_radius_nonneg(K, 1e-12).value;
}

void require_dissipative(const Eigen::MatrixXd& V, const std::string& where) {
    const SpectralResult s = spectral_bound_cooperative(-V, 1e-11);
    if (!(s.value < 0.0))
        throw NumericalError("s(-V) = " + std::to_string(s.value) + " >= 0 " + where);
}

} // namespace

LocalProfile local_R0_profile(const CompartmentModel& model, const Grid& grid) {
    const Eigen::MatrixXd c = dfe_small_limit(model, grid);
    LocalProfile out;
    out.values.resize(grid.n());
    for (int k = 0; k < grid.n(); ++k) {
        const auto u = disease_free_state(model, c, k);
        const JacobianSample jac = jacobians_at(model, grid.node(k), u);
        const std::string where = "at node " + std::to_string(k);
        require_dissipative(jac.V, where);
        out.values[k] = local_spectral_radius(jac.V, jac.F, where);
        if (k == 0 || out.values[k] > out.max_value) {
            out.max_value = out.values[k];
            out.argmax_node = k;
        }
    }
    return out;
}

AveragedLimit averaged_limit(const CompartmentModel& model, const Grid& grid) {
    const Eigen::VectorXd u_tilde = dfe_large_limit(model, grid);
    const int m = model.m();
    std::vector<double> state(static_cast<std::size_t>(model.n()), 0.0);
    for (int i = m; i < model.n(); ++i)
        state[static_cast<std::size_t>(i)] = u_tilde[i - m];

    Eigen::MatrixXd Vc = Eigen::MatrixXd::Zero(m, m), Fc = Eigen::MatrixXd::Zero(m, m);
    const Field w = grid.trapezoid_weights();
    for (int k = 0; k < grid.n(); ++k) {
        const JacobianSample jac = jacobians_at(model, grid.node(k), state);
        Vc += w[k] * jac.V;
        Fc += w[k] * jac.F;
    }

    AveragedLimit out;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Vc);
    if (!lu.isInvertible())
        throw NumericalError("singular averaged matrix Vcheck");
    Eigen::MatrixXd K = lu.solve(Fc);
    clamp_tiny_negatives(K);
    const SpectralResult r = spectral_radius_nonneg(K, 1e-12);
    out.value = r.value;
    out.slow_convergence = r.iterations > 5000;

    if (m <= 6) {
        out.hypothesis_checked = true;
        out.hypothesis_ok = true;
        const Eigen::EigenSolver<Eigen::MatrixXd> es(K);
        int nonneg_count = 0;
        const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
        for (int i = 0; i < m; ++i) {
            if (std::abs(es.eigenvalues()[i].imag()) > 1e-9 * scale)
                continue; // complex pairs have no nonnegative eigenvector
            Eigen::VectorXd v = es.eigenvectors().col(i).real();
            const Eigen::VectorXd vi = es.eigenvectors().col(i).imag();
            if (vi.lpNorm<Eigen::Infinity>() > 1e-9 * v.lpNorm<Eigen::Infinity>())
                continue;
            Eigen::Index imax;
            v.cwiseAbs().maxCoeff(&imax);
            v /= v[imax];
            if (v.minCoeff() >= -1e-9) {
                ++nonneg_count;
                if (std::abs(es.eigenvalues()[i].real() - out.value) > 1e-8 * (1.0 + out.value))
                    out.hypothesis_ok = false;
            }
        }
        if (nonneg_count == 0)
            out.hypothesis_ok = false;
        if (!out.hypothesis_ok)
            out.note = "Vcheck^-1 Fcheck has another eigenvalue with a nonnegative eigenvector";
    } else {
        out.note = "unverified hypothesis: m > 6, skipped dense full-spectrum inspection";
    }
    return out;
}

EnvelopeMatrices envelopes(const CompartmentModel& model, const Grid& grid,
                           const Eigen::MatrixXd& reference, double eps) {
    const int m = model.m();
    const int nc = model.n() - m;
    if (reference.rows() != grid.n() || reference.cols() != nc)
        throw ValidationError("reference must be (grid nodes) x (uninfected compartments)");
    if (!(eps >= 0.0))
        throw ValidationError("envelope epsilon must be nonnegative");
    const double ref_min = reference.minCoeff();
    if (!(eps < ref_min))
        throw ValidationError("envelope epsilon " + std::to_string(eps) +
                              " must stay below the minimum reference value " +
                              std::to_string(ref_min));

    EnvelopeMatrices env;
    env.epsilon = eps;
    env.Vlow_x.resize(static_cast<std::size_t>(grid.n()));
    env.Vhigh_x.resize(static_cast<std::size_t>(grid.n()));
    env.Flow_x.resize(static_cast<std::size_t>(grid.n()));
    env.Fhigh_x.resize(static_cast<std::size_t>(grid.n()));

    const int corners = 1 << nc;
    std::vector<double> state(static_cast<std::size_t>(model.n()), 0.0);
    for (int k = 0; k < grid.n(); ++k) {
        Eigen::MatrixXd Vlo, Vhi, Flo, Fhi;
        bool first = true;
        // 2^(n-m) corners plus the center of the box.
        for (int sample = 0; sample <= corners; ++sample) {
            for (int i = 0; i < nc; ++i) {
                double offset = 0.0;
                if (sample < corners)
                    offset = (sample & (1 << i)) ? eps : -eps;
                state[static_cast<std::size_t>(m + i)] = reference(k, i) + offset;
            }
            JacobianSample jac;
            try {
                jac = jacobians_at(model, grid.node(k), state);
            } catch (const EvalDomainError& err) {
                throw ValidationError(
                    std::string("epsilon-box leaves the evaluable region: ") + err.what());
            }
            if (first) {
                Vlo = jac.V;
                Vhi = jac.V;
                Flo = jac.F;
                Fhi = jac.F;
                first = false;
            } else {
                Vlo = Vlo.cwiseMin(jac.V);
                Vhi = Vhi.cwiseMax(jac.V);
                Flo = Flo.cwiseMin(jac.F);
                Fhi = Fhi.cwiseMax(jac.F);
            }
        }
        env.Vlow_x[static_cast<std::size_t>(k)] = Vlo;
        env.Vhigh_x[static_cast<std::size_t>(k)] = Vhi;
        env.Flow_x[static_cast<std::size_t>(k)] = Flo;
        env.Fhigh_x[static_cast<std::size_t>(k)] = Fhi;
        if (k == 0) {
            env.Vlow = Vlo;
            env.Vhigh = Vhi;
            env.Flow = Flo;
            env.Fhigh = Fhi;
        } else {
            env.Vlow = env.Vlow.cwiseMin(Vlo);
            env.Vhigh = env.Vhigh.cwiseMax(Vhi);
            env.Flow = env.Flow.cwiseMin(Flo);
            env.Fhigh = env.Fhigh.cwiseMax(Fhi);
        }
    }
    return env;
}

std::pair<double, double> envelope_bounds(const EnvelopeMatrices& env) {
    require_dissipative(env.Vhigh, "for the upper V envelope (Step-1 hypothesis)");
    require_dissipative(env.Vlow, "for the lower V envelope (Step-1 hypothesis)");
    const double low = local_spectral_radius(env.Vhigh, env.Flow, "in the envelope lower bound");
    const double high = local_spectral_radius(env.Vlow, env.Fhigh, "in the envelope upper bound");
    return {low, high};
}

SpectralResult auxiliary_lambda(const CompartmentModel& model, const Grid& grid, double a,
                                double eps) {
    if (!(a > 0.0))
        throw ValidationError("auxiliary eigenvalue parameter a must be positive");
    const Eigen::MatrixXd c = dfe_small_limit(model, grid);
    const EnvelopeMatrices env = envelopes(model, grid, c, eps);
    Eigen::VectorXd dI(model.m());
    for (int i = 0; i < model.m(); ++i)
        dI[i] = model.diffusion()[static_cast<std::size_t>(i)];
    const SparseMatrix A = assemble_reaction_diffusion(grid, dI, [&](int k) {
        return (-env.Vlow_x[static_cast<std::size_t>(k)] +
                a * env.Fhigh_x[static_cast<std::size_t>(k)])
            .eval();
    });
    return spectral_bound_sparse(A, 1e-10);
}

namespace {

bool within_box(const Eigen::MatrixXd& dfe, const Eigen::MatrixXd& reference, double eps) {
    return ((dfe - reference).cwiseAbs().maxCoeff()) <= eps;
}

} // namespace

LimitReport sweep(const CompartmentModel& model, const Grid& grid,
                  const std::vector<std::vector<double>>& schedule, const SweepOptions& options) {
    if (schedule.empty())
        throw ValidationError("diffusion schedule must not be empty");
    for (const auto& tuple : schedule)
        if (static_cast<int>(tuple.size()) != model.n())
            throw ValidationError("each schedule tuple needs one diffusion per compartment");

    LimitReport report;
    const int nc = model.n() - model.m();

    Eigen::MatrixXd c_ref, u_ref;
    if (model.has_dfe_small()) {
        c_ref = dfe_small_limit(model, grid);
        report.profile = local_R0_profile(model, grid);
        report.small_limit = report.profile.max_value;
        report.has_small_limit = true;
        report.eps_small = options.eps_fraction * c_ref.minCoeff();
        const EnvelopeMatrices env = envelopes(model, grid, c_ref, report.eps_small);
        try {
            report.small_bounds = envelope_bounds(env);
            report.has_small_bounds = true;
        } catch (const NumericalError&) {
            report.has_small_bounds = false;
        }
    }
    if (model.has_dfe_large()) {
        const Eigen::VectorXd u_tilde = dfe_large_limit(model, grid);
        u_ref.resize(grid.n(), nc);
        for (int i = 0; i < nc; ++i)
            u_ref.col(i).setConstant(u_tilde[i]);
        report.averaged = averaged_limit(model, grid);
        report.large_limit = report.averaged.value;
        report.has_large_limit = true;
        report.eps_large = options.eps_fraction * u_tilde.minCoeff();
        const EnvelopeMatrices env = envelopes(model, grid, u_ref, report.eps_large);
        try {
            report.large_bounds = envelope_bounds(env);
            report.has_large_bounds = true;
        } catch (const NumericalError&) {
            report.has_large_bounds = false;
        }
    }
    if (report.has_small_limit && report.has_large_limit)
        report.limit_order_violated = report.large_limit > report.small_limit + 1e-9;

    report.sweep.resize(schedule.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= schedule.size())
                return;
            SweepPoint& pt = report.sweep[idx];
            pt.diffusion = schedule[idx];
            try {
                const CompartmentModel local = model.with_diffusion(schedule[idx]);
                const DfeState dfe = solve_dfe(local, grid);
                pt.dfe_residual = dfe.residual;
                const BlockOperator op(local, grid, dfe);
                const SpectralResult r0 = compute_R0(op, options.tol);
                pt.R0 = r0.value;
                pt.r0_iterations = r0.iterations;
                pt.s_B_plus_F = spectral_bound_sparse(op.B_plus_F(), options.tol).value;
                if (report.has_small_limit)
                    pt.in_small_box = within_box(dfe.values, c_ref, report.eps_small);
                if (report.has_large_limit)
                    pt.in_large_box = within_box(dfe.values, u_ref, report.eps_large);
                if (pt.in_small_box && report.has_small_bounds) {
                    pt.has_envelope = true;
                    pt.envelope_low = report.small_bounds.first;
                    pt.envelope_high = report.small_bounds.second;
                } else if (pt.in_large_box && report.has_large_bounds) {
                    pt.has_envelope = true;
                    pt.envelope_low = report.large_bounds.first;
                    pt.envelope_high = report.large_bounds.second;
                }
            } catch (const Error& err) {
                pt.failed = true;
                pt.error = err.what();
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || schedule.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int count = std::min<int>(jobs, static_cast<int>(schedule.size()));
        pool.reserve(static_cast<std::size_t>(count));
        for (int t = 0; t < count; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return report;
}

} // namespace rdr0
