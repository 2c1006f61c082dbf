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
#include "rdr0/sim.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>

#include "rdr0/block_assembly.hpp"

namespace rdr0 {

Trajectory evolve_linear(const SparseMatrix& A, const Eigen::VectorXd& phi0, double T, double dt,
                         int store_stride) {
    if (!(dt > 0.0) || !(T > 0.0))
        throw ValidationError("evolution needs positive T and dt");
    if (phi0.size() != A.rows())
        throw ValidationError("initial data size does not match the operator");
    if (phi0.minCoeff() < 0.0)
        throw ValidationError("initial data must be entrywise nonnegative");
    const int steps = std::max(1, static_cast<int>(std::ceil(T / dt - 1e-12)));
    const double dt_eff = T / steps;

    SparseMatrix M(A.rows(), A.cols());
    M.setIdentity();
    M -= dt_eff * A;
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success)
        throw NumericalError("factorization of the implicit Euler step matrix failed");

    Trajectory traj;
    traj.dt = dt_eff;
    traj.steps = steps;
    traj.times.push_back(0.0);
    traj.states.push_back(phi0);
    Eigen::VectorXd u = phi0;
    for (int k = 1; k <= steps; ++k) {
        u = lu.solve(u);
        if (k % store_stride == 0 || k == steps) {
            traj.times.push_back(k * dt_eff);
            traj.states.push_back(u);
        }
    }
    return traj;
}

ComparisonReport comparison_test(const std::vector<Eigen::MatrixXd>& P1_nodes,
                                 const std::vector<Eigen::MatrixXd>& P2_nodes, const Grid& grid,
                                 const Eigen::VectorXd& d_infected, const Eigen::VectorXd& phi0,
                                 double T, double dt) {
    const int m = static_cast<int>(d_infected.size());
    if (static_cast<int>(P1_nodes.size()) != grid.n() ||
        static_cast<int>(P2_nodes.size()) != grid.n())
        throw ValidationError("need one coupling matrix per grid node");
    for (int k = 0; k < grid.n(); ++k) {
        const auto& P1 = P1_nodes[static_cast<std::size_t>(k)];
        const auto& P2 = P2_nodes[static_cast<std::size_t>(k)];
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i != j && (P1(i, j) < -kCooperativityTol || P2(i, j) < -kCooperativityTol))
                    throw ValidationError("coupling matrices must be cooperative (node " +
                                          std::to_string(k) + ")");
                if (P1(i, j) < P2(i, j) - kCooperativityTol)
                    throw ValidationError("P1 >= P2 violated at node " + std::to_string(k) +
                                          ", entry (" + std::to_string(i + 1) + "," +
                                          std::to_string(j + 1) + ")");
            }
    }
    const SparseMatrix A1 = assemble_reaction_diffusion(
        grid, d_infected, [&](int k) { return P1_nodes[static_cast<std::size_t>(k)]; });
    const SparseMatrix A2 = assemble_reaction_diffusion(
        grid, d_infected, [&](int k) { return P2_nodes[static_cast<std::size_t>(k)]; });
    const Trajectory t1 = evolve_linear(A1, phi0, T, dt);
    const Trajectory t2 = evolve_linear(A2, phi0, T, dt);

    ComparisonReport report;
    report.checked_times = static_cast<int>(t1.times.size());
    for (std::size_t s = 0; s < t1.states.size(); ++s) {
        const double gap = (t1.states[s] - t2.states[s]).minCoeff();
        if (gap < report.worst_violation) {
            report.worst_violation = gap;
            if (report.ordered && gap < -1e-12) {
                report.ordered = false;
                report.first_violation_time = t1.times[s];
            }
        }
    }
    return report;
}

namespace {

// One implicit Euler step of the full nonlinear system, Newton inner solves.
class NonlinearStepper {
public:
    NonlinearStepper(const CompartmentModel& model, const Grid& grid, double dt)
        : model_(model), grid_(grid), dt_(dt), n_(model.n()) {
        Eigen::VectorXd d(n_);
        for (int i = 0; i < n_; ++i)
            d[i] = model.diffusion()[static_cast<std::size_t>(i)];
        diffusion_ = assemble_reaction_diffusion(
            grid, d, [this](int) { return Eigen::MatrixXd::Zero(n_, n_).eval(); });
        identity_.resize(diffusion_.rows(), diffusion_.cols());
        identity_.setIdentity();
    }

    Eigen::VectorXd reaction(const Eigen::VectorXd& u) const {
        Eigen::VectorXd r(u.size());
        std::vector<double> s(static_cast<std::size_t>(n_));
        for (int k = 0; k < grid_.n(); ++k) {
            for (int i = 0; i < n_; ++i)
                s[static_cast<std::size_t>(i)] = u[block_index(k, i, n_)];
            for (int i = 0; i < n_; ++i)
                r[block_index(k, i, n_)] = model_.f_expr(i).evaluate(grid_.node(k), s);
        }
        return r;
    }

    Eigen::VectorXd step(const Eigen::VectorXd& u_old) const {
        Eigen::VectorXd u = u_old;
        const double scale = std::max(1.0, u_old.lpNorm<Eigen::Infinity>());
        for (int newton = 0; newton < 12; ++newton) {
            const Eigen::VectorXd G = u - u_old - dt_ * (diffusion_ * u + reaction(u));
            if (G.lpNorm<Eigen::Infinity>() <= 1e-12 * scale)
                return u;
            SparseMatrix J = identity_ - dt_ * (diffusion_ + jacobian(u));
            Eigen::SparseLU<SparseMatrix> lu;
            lu.compute(J);
            if (lu.info() != Eigen::Success)
                throw NumericalError("nonlinear step: Jacobian factorization failed");
            u -= lu.solve(G);
            if (!u.allFinite())
                throw NumericalError("nonlinear step diverged (blow-up detected)");
        }
        throw NumericalError("nonlinear step: Newton did not converge");
    }

private:
    SparseMatrix jacobian(const Eigen::VectorXd& u) const {
        std::vector<double> s(static_cast<std::size_t>(n_));
        Eigen::VectorXd d(n_);
        for (int i = 0; i < n_; ++i)
            d[i] = 0.0;
        return assemble_reaction_diffusion(grid_, Eigen::VectorXd::Zero(n_), [&](int k) {
            std::vector<double> state(static_cast<std::size_t>(n_));
            for (int i = 0; i < n_; ++i)
                state[static_cast<std::size_t>(i)] = u[block_index(k, i, n_)];
            Eigen::MatrixXd Jk(n_, n_);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j)
                    Jk(i, j) = model_.df(i, j).evaluate(grid_.node(k), state);
            return Jk;
        });
    }

    const CompartmentModel& model_;
    const Grid& grid_;
    double dt_;
    int n_;
    SparseMatrix diffusion_;
    SparseMatrix identity_;
};

} // namespace

StabilityReport dfe_stability_test(const CompartmentModel& model, const Grid& grid,
                                   const DfeState& dfe, const StabilityOptions& options) {
    const int n = model.n();
    const int m = model.m();
    const double dt = options.dt > 0.0 ? options.dt : options.T / 1000.0;
    const int steps = std::max(1, static_cast<int>(std::ceil(options.T / dt - 1e-12)));
    const double dt_eff = options.T / steps;

    // Baseline state and perturbation: a positive bump centered in the
    // domain, applied to the infected compartments.
    Eigen::VectorXd base(static_cast<Eigen::Index>(grid.n()) * n);
    for (int k = 0; k < grid.n(); ++k)
        for (int i = 0; i < n; ++i)
            base[block_index(k, i, n)] = i < m ? 0.0 : dfe.values(k, i - m);
    const double scale = std::max(1e-12, dfe.values.maxCoeff());
    const double mid = 0.5 * (grid.a() + grid.b());
    const double width = 0.1 * (grid.b() - grid.a());
    Eigen::VectorXd u = base;
    for (int k = 0; k < grid.n(); ++k) {
        const double bump =
            options.amplitude * scale * std::exp(-std::pow((grid.node(k) - mid) / width, 2));
        for (int i = 0; i < m; ++i)
            u[block_index(k, i, n)] += bump;
    }

    auto distance = [&](const Eigen::VectorXd& v) {
        return (v - base).lpNorm<Eigen::Infinity>();
    };
    auto infected_norm = [&](const Eigen::VectorXd& v) {
        double s = 0.0;
        for (int k = 0; k < grid.n(); ++k)
            for (int i = 0; i < m; ++i)
                s = std::max(s, std::abs(v[block_index(k, i, n)]));
        return s;
    };

    NonlinearStepper stepper(model, grid, dt_eff);
    StabilityReport report;
    report.times.push_back(0.0);
    report.distances.push_back(distance(u));
    report.infected_sup.push_back(infected_norm(u));
    report.initial_distance = report.distances.front();
    for (int k = 1; k <= steps; ++k) {
        u = stepper.step(u);
        report.times.push_back(k * dt_eff);
        report.distances.push_back(distance(u));
        report.infected_sup.push_back(infected_norm(u));
    }
    report.final_distance = report.distances.back();
    report.half_decay = report.final_distance <= 0.5 * report.initial_distance;
    report.below_initial = report.final_distance < report.initial_distance;
    report.infected_grew = report.infected_sup.back() > report.infected_sup.front();

    report.tail_nonincreasing = true;
    const double slack = options.tail_slack_fraction * std::max(report.initial_distance, 1e-300);
    for (std::size_t s = report.distances.size() / 2; s + 1 < report.distances.size(); ++s)
        if (report.distances[s + 1] > report.distances[s] + slack) {
            report.tail_nonincreasing = false;
            break;
        }

    if (options.expect_growth)
        report.passed = report.infected_grew;
    else if (options.amplitude == 0.0)
        report.passed = report.final_distance <= 1e-10;
    else
        report.passed = report.below_initial && report.tail_nonincreasing;
    return report;
}

} // namespace rdr0
