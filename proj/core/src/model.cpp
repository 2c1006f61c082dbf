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
#include "rdr0/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "rdr0/block_assembly.hpp"
#include "rdr0/spectral.hpp"

namespace rdr0 {

CompartmentModel::CompartmentModel(Setup setup) : setup_(std::move(setup)) {
    const int nn = static_cast<int>(setup_.names.size());
    const int mm = setup_.n_infected;
    if (nn < 2)
        throw ValidationError("model needs at least two compartments");
    if (mm < 1 || mm >= nn)
        throw ValidationError("infected count m must satisfy 1 <= m < n");
    std::set<std::string> unique(setup_.names.begin(), setup_.names.end());
    if (static_cast<int>(unique.size()) != nn)
        throw ValidationError("compartment names must be unique");
    if (static_cast<int>(setup_.diffusion.size()) != nn)
        throw ValidationError("need one diffusion rate per compartment");
    for (double d : setup_.diffusion)
        if (!(d > 0.0))
            throw ValidationError("diffusion rates must be strictly positive");
    if (!(setup_.domain_a < setup_.domain_b))
        throw ValidationError("domain requires a < b");
    auto check_size = [nn](const auto& v, const char* what) {
        if (static_cast<int>(v.size()) != nn)
            throw ValidationError(std::string("need one ") + what + " expression per compartment");
    };
    check_size(setup_.F, "F");
    check_size(setup_.Vplus, "V+");
    check_size(setup_.Vminus, "V-");
    // Structural zeros of F below the infected block.
    for (int i = mm; i < nn; ++i)
        if (!setup_.F[i].is_zero())
            throw ValidationError("F must be identically zero for uninfected compartment '" +
                                  setup_.names[i] + "'");
    const int n_uninf = nn - mm;
    if (!setup_.dfe_fixed.empty() && static_cast<int>(setup_.dfe_fixed.size()) != n_uninf)
        throw ValidationError("dfe_fixed needs one expression per uninfected compartment");
    if (!setup_.dfe_small.empty() && static_cast<int>(setup_.dfe_small.size()) != n_uninf)
        throw ValidationError("dfe_small needs one expression per uninfected compartment");
    if (!setup_.dfe_large.empty() && static_cast<int>(setup_.dfe_large.size()) != n_uninf)
        throw ValidationError("dfe_large needs one ratio per uninfected compartment");

    vocabulary_.reserve(static_cast<std::size_t>(nn) + 1);
    vocabulary_.push_back("x");
    for (const auto& name : setup_.names)
        vocabulary_.push_back(name);

    auto check_slots = [nn](const Expr& e, const std::string& what) {
        if (e.max_slot() > nn)
            throw ValidationError(what + " references a variable outside the vocabulary");
    };
    for (int i = 0; i < nn; ++i) {
        check_slots(setup_.F[i], "F[" + setup_.names[i] + "]");
        check_slots(setup_.Vplus[i], "V+[" + setup_.names[i] + "]");
        check_slots(setup_.Vminus[i], "V-[" + setup_.names[i] + "]");
    }

    f_.reserve(nn);
    for (int i = 0; i < nn; ++i)
        f_.push_back(setup_.F[i] - (setup_.Vminus[i] - setup_.Vplus[i]));

    dF_.reserve(static_cast<std::size_t>(nn) * nn);
    dV_.reserve(static_cast<std::size_t>(nn) * nn);
    df_.reserve(static_cast<std::size_t>(nn) * nn);
    for (int i = 0; i < nn; ++i) {
        const Expr Vi = setup_.Vminus[i] - setup_.Vplus[i];
        for (int j = 0; j < nn; ++j) {
            dF_.push_back(setup_.F[i].derivative(j + 1));
            dV_.push_back(Vi.derivative(j + 1));
            df_.push_back(f_[i].derivative(j + 1));
        }
    }

    floor_ = setup_.sample_floor;
    if (floor_.empty())
        floor_.assign(static_cast<std::size_t>(nn), 0.0);
    else if (static_cast<int>(floor_.size()) != nn)
        throw ValidationError("sample_floor needs one value per compartment");
}

CompartmentModel CompartmentModel::with_diffusion(const std::vector<double>& d) const {
    Setup s = setup_;
    s.diffusion = d;
    return CompartmentModel(std::move(s));
}

JacobianSample jacobians_at(const CompartmentModel& model, double x, std::span<const double> u) {
    const int n = model.n();
    const int m = model.m();
    if (static_cast<int>(u.size()) != n)
        throw ValidationError("state vector must have one entry per compartment");
    JacobianSample out;
    out.x = x;
    out.F.resize(m, m);
    out.V.resize(m, m);
    out.M.resize(n - m, n - m);
    auto eval = [&](const Expr& e, const char* block, int i, int j) {
        try {
            return e.evaluate(x, u);
        } catch (const EvalDomainError& err) {
            std::ostringstream msg;
            msg << err.what() << " [" << block << " entry (" << i + 1 << "," << j + 1
                << "), compartment '" << model.names()[static_cast<std::size_t>(i)] << "']";
            throw EvalDomainError(err.fault(), msg.str());
        }
    };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            out.F(i, j) = eval(model.dF(i, j), "F", i, j);
            out.V(i, j) = eval(model.dV(i, j), "V", i, j);
        }
    for (int i = m; i < n; ++i)
        for (int j = m; j < n; ++j)
            out.M(i - m, j - m) = eval(model.df(i, j), "M", i, j);
    return out;
}

std::vector<double> disease_free_state(const CompartmentModel& model,
                                       const Eigen::MatrixXd& dfe_values, int node) {
    std::vector<double> u(static_cast<std::size_t>(model.n()), 0.0);
    for (int i = model.m(); i < model.n(); ++i)
        u[static_cast<std::size_t>(i)] = dfe_values(node, i - model.m());
    return u;
}

std::string AssumptionReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "[pass] " : "[FAIL] ") << c.name;
        if (!c.detail.empty())
            os << " — " << c.detail;
        os << "\n";
    }
    return os.str();
}

namespace {

std::string node_tag(const Grid& grid, int k) {
    std::ostringstream os;
    os << "node " << k << " (x=" << grid.node(k) << ")";
    return os.str();
}

} // namespace

AssumptionReport check_assumptions(const CompartmentModel& model, const Grid& grid,
                                   const Eigen::MatrixXd& dfe_values, int sample_count,
                                   unsigned seed) {
    const int n = model.n();
    const int m = model.m();
    if (dfe_values.rows() != grid.n() || dfe_values.cols() != n - m)
        throw ValidationError("dfe_values must be (grid nodes) x (uninfected compartments)");

    AssumptionReport report;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Per-compartment sampling scale from the DFE profile (uninfected) or 1.
    std::vector<double> scale(static_cast<std::size_t>(n), 1.0);
    for (int i = m; i < n; ++i)
        scale[static_cast<std::size_t>(i)] = std::max(1e-3, dfe_values.col(i - m).maxCoeff());

    auto random_state = [&](bool zero_infected) {
        std::vector<double> u(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const double lo = model.sample_floor()[static_cast<std::size_t>(i)];
            u[static_cast<std::size_t>(i)] =
                std::max(lo, 2.0 * scale[static_cast<std::size_t>(i)] * unit(rng));
            if (zero_infected && i < m)
                u[static_cast<std::size_t>(i)] = 0.0;
        }
        return u;
    };
    auto random_node = [&] { return static_cast<int>(unit(rng) * (grid.n() - 1)); };

    // (A1): the reaction pieces are nonnegative on the sampled region.
    {
        AssumptionCheck c{"(A1) F, V+, V- nonnegative on sampled states", true, ""};
        double worst = 0.0;
        for (int s = 0; s < sample_count && c.passed; ++s) {
            const int k = random_node();
            const auto u = random_state(false);
            for (int i = 0; i < n; ++i) {
                for (const Expr* e :
                     {&model.F_expr(i), &model.Vplus_expr(i), &model.Vminus_expr(i)}) {
                    double v;
                    try {
                        v = e->evaluate(grid.node(k), u);
                    } catch (const EvalDomainError& err) {
                        c.passed = false;
                        c.detail = std::string(err.what()) + " at " + node_tag(grid, k);
                        break;
                    }
                    if (v < -kCooperativityTol && v < worst) {
                        worst = v;
                        c.passed = false;
                        c.detail = "value " + std::to_string(v) + " at " + node_tag(grid, k) +
                                   ", compartment '" + model.names()[static_cast<std::size_t>(i)] +
                                   "'";
                    }
                }
                if (!c.passed)
                    break;
            }
        }
        report.checks.push_back(std::move(c));
    }

    // (A2): V-_i vanishes on the u_i = 0 slice (sampled).
    {
        AssumptionCheck c{"(A2) V- vanishes where its compartment is empty", true, ""};
        for (int i = 0; i < n && c.passed; ++i) {
            for (int s = 0; s < sample_count; ++s) {
                const int k = random_node();
                auto u = random_state(false);
                u[static_cast<std::size_t>(i)] = 0.0;
                double v;
                try {
                    v = model.Vminus_expr(i).evaluate(grid.node(k), u);
                } catch (const EvalDomainError&) {
                    continue; // outside the evaluable region; slice not informative
                }
                if (std::abs(v) > 1e-12) {
                    c.passed = false;
                    c.detail = "V-[" + model.names()[static_cast<std::size_t>(i)] + "] = " +
                               std::to_string(v) + " with u_i = 0 at " + node_tag(grid, k);
                    break;
                }
            }
        }
        report.checks.push_back(std::move(c));
    }

    // (A3): F structurally zero below the infected block (also enforced at
    // construction).
    {
        AssumptionCheck c{"(A3) F identically zero for uninfected compartments", true, ""};
        for (int i = m; i < n; ++i)
            if (!model.F_expr(i).is_zero()) {
                c.passed = false;
                c.detail = "F[" + model.names()[static_cast<std::size_t>(i)] +
                           "] is not the literal zero expression";
            }
        report.checks.push_back(std::move(c));
    }

    // (A4): on disease-free states, F_i = V+_i = 0 for infected rows (sampled).
    {
        AssumptionCheck c{"(A4) F and V+ vanish on disease-free states", true, ""};
        for (int s = 0; s < sample_count && c.passed; ++s) {
            const int k = random_node();
            const auto u = random_state(true);
            for (int i = 0; i < m; ++i) {
                double fv, vv;
                try {
                    fv = model.F_expr(i).evaluate(grid.node(k), u);
                    vv = model.Vplus_expr(i).evaluate(grid.node(k), u);
                } catch (const EvalDomainError& err) {
                    c.passed = false;
                    c.detail = std::string(err.what()) + " at " + node_tag(grid, k);
                    break;
                }
                if (std::abs(fv) > 1e-12 || std::abs(vv) > 1e-12) {
                    c.passed = false;
                    c.detail = "nonzero new-infection/transfer-in rate on a disease-free state at " +
                               node_tag(grid, k);
                    break;
                }
            }
        }
        report.checks.push_back(std::move(c));
    }

    // Nodewise quantities at the disease-free state.
    bool coop_V_ok = true, coop_M_ok = true, F_pos_ok = true, irr_ok = true, sV_ok = true;
    std::string coop_V_detail, coop_M_detail, F_pos_detail, irr_detail, sV_detail;
    double worst_sV = -std::numeric_limits<double>::infinity();
    std::vector<Eigen::MatrixXd> M_cache(static_cast<std::size_t>(grid.n()));
    for (int k = 0; k < grid.n(); ++k) {
        const auto u = disease_free_state(model, dfe_values, k);
        const JacobianSample jac = jacobians_at(model, grid.node(k), u);
        M_cache[static_cast<std::size_t>(k)] = jac.M;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (i != j && -jac.V(i, j) < -kCooperativityTol && coop_V_ok) {
                    coop_V_ok = false;
                    coop_V_detail = "(-V)(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    ") = " + std::to_string(-jac.V(i, j)) + " at " +
                                    node_tag(grid, k);
                }
                if (jac.F(i, j) < -kCooperativityTol && F_pos_ok) {
                    F_pos_ok = false;
                    F_pos_detail = "F(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                   ") = " + std::to_string(jac.F(i, j)) + " at " + node_tag(grid, k);
                }
            }
        for (int i = 0; i < n - m; ++i)
            for (int j = 0; j < n - m; ++j)
                if (i != j && jac.M(i, j) < -kCooperativityTol && coop_M_ok) {
                    coop_M_ok = false;
                    coop_M_detail = "M(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                    ") = " + std::to_string(jac.M(i, j)) + " at " + node_tag(grid, k);
                }
        if (coop_V_ok) {
            const SpectralResult sv = spectral_bound_cooperative(-jac.V, 1e-11);
            if (sv.value > worst_sV)
                worst_sV = sv.value;
            if (!(sv.value < 0.0) && sV_ok) {
                sV_ok = false;
                sV_detail = "s(-V) = " + std::to_string(sv.value) + " at " + node_tag(grid, k);
            }
        }
        // Irreducibility of the (-V off-diagonal) | F pattern; a > 0 never
        // zeroes a pattern entry, so this is the a-independent check.
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> pattern(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                pattern(i, j) = (i != j) && (-jac.V(i, j) > kCooperativityTol ||
                                             jac.F(i, j) > kCooperativityTol);
        if (!is_irreducible(pattern) && irr_ok) {
            irr_ok = false;
            irr_detail = "pattern not strongly connected at " + node_tag(grid, k);
        }
    }
    report.checks.push_back({"(A6a) -V cooperative at the disease-free state", coop_V_ok,
                             coop_V_detail});
    report.checks.push_back({"(A6b) s(-V(x, u0(x))) < 0 nodewise", sV_ok,
                             sV_ok ? "max over nodes: " + std::to_string(worst_sV) : sV_detail});
    report.checks.push_back({"(A5a) M cooperative at the disease-free state", coop_M_ok,
                             coop_M_detail});
    report.checks.push_back({"F entrywise nonnegative at the disease-free state", F_pos_ok,
                             F_pos_detail});
    report.checks.push_back({"irreducibility of the (-V)|F pattern nodewise", irr_ok, irr_detail});

    // (A5b): s(d_S Lap + M(x, u0)) < 0 on the uninfected block.
    {
        AssumptionCheck c{"(A5b) s(d_S Lap + M(x, u0(x))) < 0", true, ""};
        if (coop_M_ok) {
            Eigen::VectorXd dS(n - m);
            for (int i = m; i < n; ++i)
                dS[i - m] = model.diffusion()[static_cast<std::size_t>(i)];
            const SparseMatrix A = assemble_reaction_diffusion(
                grid, dS, [&](int k) { return M_cache[static_cast<std::size_t>(k)]; });
            try {
                const SpectralResult s = spectral_bound_sparse(A, 1e-9);
                c.passed = s.value < 0.0;
                c.detail = "s = " + std::to_string(s.value);
            } catch (const NumericalError& err) {
                c.passed = false;
                c.detail = err.what();
            }
        } else {
            c.passed = false;
            c.detail = "skipped: M not cooperative";
        }
        report.checks.push_back(std::move(c));
    }

    report.spectral_preconditions_ok = coop_V_ok && sV_ok;
    return report;
}

} // namespace rdr0
