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
#include "rdr0/dfe.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "rdr0/block_assembly.hpp"

namespace rdr0 {

namespace {

// Uninfected subsystem in node-major block layout, nc = n - m components.
struct UninfectedSystem {
    const CompartmentModel& model;
    const Grid& grid;
    int nc;
    Eigen::VectorXd dS;
    SparseMatrix diffusion; // block Laplacians, no reaction

    UninfectedSystem(const CompartmentModel& mdl, const Grid& g)
        : model(mdl), grid(g), nc(mdl.n() - mdl.m()), dS(nc) {
        for (int i = 0; i < nc; ++i)
            dS[i] = mdl.diffusion()[static_cast<std::size_t>(mdl.m() + i)];
        diffusion = assemble_reaction_diffusion(
            grid, dS, [this](int) { return Eigen::MatrixXd::Zero(nc, nc).eval(); });
    }

    std::vector<double> full_state(const Eigen::VectorXd& u, int k) const {
        std::vector<double> s(static_cast<std::size_t>(model.n()), 0.0);
        for (int i = 0; i < nc; ++i)
            s[static_cast<std::size_t>(model.m() + i)] = u[block_index(k, i, nc)];
        return s;
    }

    // R(u) = D_S Lap u + f_S(x, (0,u)).
    Eigen::VectorXd residual(const Eigen::VectorXd& u) const {
        Eigen::VectorXd r = diffusion * u;
        for (int k = 0; k < grid.n(); ++k) {
            const auto s = full_state(u, k);
            for (int i = 0; i < nc; ++i)
                r[block_index(k, i, nc)] +=
                    model.f_expr(model.m() + i).evaluate(grid.node(k), s);
        }
        return r;
    }

    SparseMatrix jacobian(const Eigen::VectorXd& u) const {
        return assemble_reaction_diffusion(grid, dS, [&](int k) {
            const auto s = full_state(u, k);
            Eigen::MatrixXd M(nc, nc);
            for (int i = 0; i < nc; ++i)
                for (int j = 0; j < nc; ++j)
                    M(i, j) = model.df(model.m() + i, model.m() + j)
                                  .evaluate(grid.node(k), s);
            return M;
        });
    }

    double noise_floor(const Eigen::VectorXd& u) const {
        const double stiff = 1.0 + 2.0 * dS.maxCoeff() / (grid.h() * grid.h());
        return 8.0 * std::numeric_limits<double>::epsilon() * stiff *
               std::max(1.0, u.lpNorm<Eigen::Infinity>());
    }
};

Eigen::MatrixXd unstack(const Eigen::VectorXd& u, int n_nodes, int nc) {
    Eigen::MatrixXd out(n_nodes, nc);
    for (int k = 0; k < n_nodes; ++k)
        for (int i = 0; i < nc; ++i)
            out(k, i) = u[block_index(k, i, nc)];
    return out;
}

Eigen::VectorXd stack(const Eigen::MatrixXd& vals, int nc) {
    Eigen::VectorXd u(vals.rows() * nc);
    for (int k = 0; k < vals.rows(); ++k)
        for (int i = 0; i < nc; ++i)
            u[block_index(static_cast<int>(k), i, nc)] = vals(k, i);
    return u;
}

int worst_node(const Eigen::VectorXd& r, int nc) {
    Eigen::Index imax;
    r.cwiseAbs().maxCoeff(&imax);
    return static_cast<int>(imax / nc);
}

void check_positivity(const Eigen::MatrixXd& values, const CompartmentModel& model) {
    for (int i = 0; i < values.cols(); ++i) {
        Eigen::Index kmin;
        const double v = values.col(i).minCoeff(&kmin);
        if (!(v > 0.0)) {
            std::ostringstream os;
            os << "disease-free state not strictly positive: compartment '"
               << model.names()[static_cast<std::size_t>(model.m() + i)] << "' has value " << v
               << " at node " << kmin;
            throw NumericalError(os.str());
        }
    }
}

// Damped Newton; returns true on convergence, false when it stalls.
bool newton(const UninfectedSystem& sys, Eigen::VectorXd& u, double tol, int max_iters,
            int& iterations, double& achieved) {
    Eigen::VectorXd r = sys.residual(u);
    double rn = r.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < max_iters; ++it) {
        const double tol_eff = std::max(tol, sys.noise_floor(u));
        if (rn <= tol_eff) {
            achieved = rn;
            return true;
        }
        Eigen::SparseLU<SparseMatrix> lu;
        lu.compute(sys.jacobian(u));
        if (lu.info() != Eigen::Success)
            return false;
        const Eigen::VectorXd step = lu.solve(-r);
        double lambda = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings <= 30; ++halvings) {
            const Eigen::VectorXd trial = u + lambda * step;
            Eigen::VectorXd rt;
            try {
                rt = sys.residual(trial);
            } catch (const EvalDomainError&) {
                lambda *= 0.5;
                continue;
            }
            const double rtn = rt.lpNorm<Eigen::Infinity>();
            if (rtn < rn || rtn <= tol_eff) {
                u = trial;
                r = std::move(rt);
                rn = rtn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        ++iterations;
        if (!accepted) {
            achieved = rn;
            return rn <= std::max(tol, sys.noise_floor(u));
        }
    }
    achieved = rn;
    return rn <= std::max(tol, sys.noise_floor(u));
}

} // namespace

Eigen::MatrixXd dfe_small_limit(const CompartmentModel& model, const Grid& grid) {
    if (!model.has_dfe_small())
        throw ValidationError(
            "model does not declare a small-diffusion DFE profile (dfe_small)");
    const int nc = model.n() - model.m();
    Eigen::MatrixXd out(grid.n(), nc);
    const std::vector<double> empty(static_cast<std::size_t>(model.n()), 0.0);
    for (int i = 0; i < nc; ++i)
        for (int k = 0; k < grid.n(); ++k)
            out(k, i) = model.dfe_small()[static_cast<std::size_t>(i)].evaluate(grid.node(k), empty);
    for (int i = 0; i < nc; ++i)
        if (!(out.col(i).minCoeff() > 0.0))
            throw ValidationError("declared small-diffusion profile is not strictly positive");
    return out;
}

Eigen::VectorXd dfe_large_limit(const CompartmentModel& model, const Grid& grid) {
    if (!model.has_dfe_large())
        throw ValidationError(
            "model does not declare large-diffusion DFE constants (dfe_large)");
    const int nc = model.n() - model.m();
    Eigen::VectorXd out(nc);
    const std::vector<double> empty(static_cast<std::size_t>(model.n()), 0.0);
    for (int i = 0; i < nc; ++i) {
        const auto& [num, den] = model.dfe_large()[static_cast<std::size_t>(i)];
        const double a = integrate(grid, grid.sample([&](double x) { return num.evaluate(x, empty); }));
        const double b = integrate(grid, grid.sample([&](double x) { return den.evaluate(x, empty); }));
        if (b == 0.0)
            throw ValidationError("large-diffusion ratio has zero denominator integral");
        out[i] = a / b;
        if (!(out[i] > 0.0))
            throw ValidationError("declared large-diffusion constant is not strictly positive");
    }
    return out;
}

DfeState solve_dfe(const CompartmentModel& model, const Grid& grid, double tol,
                   const Eigen::MatrixXd* initial) {
    const int nc = model.n() - model.m();
    UninfectedSystem sys(model, grid);
    DfeState state;

    if (model.has_dfe_fixed()) {
        Eigen::MatrixXd vals(grid.n(), nc);
        const std::vector<double> empty(static_cast<std::size_t>(model.n()), 0.0);
        for (int i = 0; i < nc; ++i)
            for (int k = 0; k < grid.n(); ++k)
                vals(k, i) =
                    model.dfe_fixed()[static_cast<std::size_t>(i)].evaluate(grid.node(k), empty);
        check_positivity(vals, model);
        const Eigen::VectorXd u = stack(vals, nc);
        const Eigen::VectorXd r = sys.residual(u);
        state.values = std::move(vals);
        state.residual = r.lpNorm<Eigen::Infinity>();
        state.residual_floor = sys.noise_floor(u);
        state.method = "prescribed";
        if (state.residual > std::max(tol, state.residual_floor)) {
            std::ostringstream os;
            os << "prescribed DFE does not satisfy the steady equations: residual "
               << state.residual << " at node " << worst_node(r, nc);
            throw NumericalError(os.str());
        }
        return state;
    }

    Eigen::VectorXd u;
    if (initial != nullptr) {
        if (initial->rows() != grid.n() || initial->cols() != nc)
            throw ValidationError("initial DFE guess has the wrong shape");
        u = stack(*initial, nc);
    } else if (model.has_dfe_small()) {
        u = stack(dfe_small_limit(model, grid), nc);
    } else {
        u = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(grid.n()) * nc);
    }

    int iterations = 0;
    double achieved = std::numeric_limits<double>::infinity();
    if (newton(sys, u, tol, 60, iterations, achieved)) {
        state.method = "newton";
    } else {
        // Pseudo-time continuation: implicit diffusion, explicit reaction,
        // growing dt, then a Newton restart.
        double dt = 1e-2;
        const Eigen::Index dim = u.size();
        SparseMatrix identity(dim, dim);
        identity.setIdentity();
        Eigen::VectorXd v = u;
        for (int step = 0; step < 120 && dt < 1e6;) {
            SparseMatrix M = identity;
            M -= dt * sys.diffusion;
            Eigen::SparseLU<SparseMatrix> lu;
            lu.compute(M);
            if (lu.info() != Eigen::Success)
                break;
            Eigen::VectorXd reaction(dim);
            bool ok = true;
            try {
                Eigen::VectorXd r = sys.residual(v);
                reaction = r - sys.diffusion * v; // f_S part only
            } catch (const EvalDomainError&) {
                ok = false;
            }
            if (ok) {
                const Eigen::VectorXd next = lu.solve(v + dt * reaction);
                if (next.allFinite()) {
                    v = next;
                    dt *= 2.0;
                    ++step;
                    continue;
                }
            }
            dt *= 0.25;
            ++step;
        }
        u = v;
        iterations = 0;
        if (!newton(sys, u, tol, 60, iterations, achieved)) {
            const Eigen::VectorXd r = sys.residual(u);
            std::ostringstream os;
            os << "DFE solver did not converge: residual " << r.lpNorm<Eigen::Infinity>()
               << " at node " << worst_node(r, nc);
            throw NumericalError(os.str());
        }
        state.method = "pseudo-time+newton";
    }

    state.values = unstack(u, grid.n(), nc);
    check_positivity(state.values, model);
    state.residual = achieved;
    state.residual_floor = sys.noise_floor(u);
    state.iterations = iterations;
    return state;
}

} // namespace rdr0
