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
#include "rdr0/commands.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "rdr0/limits.hpp"
#include "rdr0/model_file.hpp"
#include "rdr0/models.hpp"
#include "rdr0/r0.hpp"
#include "rdr0/sim.hpp"

namespace rdr0 {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

struct LoadedModel {
    CompartmentModel model;
    std::vector<bool> sweep_mask;
    bool is_builtin = false;
    std::string display;
    std::optional<BuiltinModel> builtin;
};

LoadedModel load_model(const CommandOptions& options) {
    if (options.model_ref.empty())
        throw ValidationError("no model given (--model <path|builtin:name>)");
    if (options.model_ref.rfind("builtin:", 0) == 0) {
        const std::string name = options.model_ref.substr(8);
        BuiltinModel b = make_builtin(name, options.params);
        LoadedModel out{b.model, std::vector<bool>(static_cast<std::size_t>(b.model.n()), true),
                        true, "builtin:" + name, std::move(b)};
        return out;
    }
    if (!options.params.empty())
        throw ValidationError("--param overrides apply to builtin models only");
    ModelFile f = load_model_file(options.model_ref);
    return LoadedModel{f.model, f.sweep_mask, false, f.source, std::nullopt};
}

/// Diffusion tuple for a single run: n values, one value broadcast to the
/// sweepable entries, or the model's own rates when none given.
std::vector<double> resolve_diffusion(const LoadedModel& lm, const std::vector<double>& d) {
    const int n = lm.model.n();
    std::vector<double> out = lm.model.diffusion();
    if (d.empty()) {
        for (int i = 0; i < n; ++i)
            if (lm.sweep_mask[static_cast<std::size_t>(i)] && !lm.is_builtin)
                throw ValidationError("model declares \"sweep\" diffusion entries; supply --d");
        return out;
    }
    if (static_cast<int>(d.size()) == 1) {
        for (int i = 0; i < n; ++i)
            if (lm.sweep_mask[static_cast<std::size_t>(i)])
                out[static_cast<std::size_t>(i)] = d[0];
        return out;
    }
    if (static_cast<int>(d.size()) == n) {
        return d;
    }
    throw ValidationError("--d needs 1 value or one per compartment (" + std::to_string(n) + ")");
}

void validate_grid(const CommandOptions& options) {
    if (options.grid_n < 3)
        throw ValidationError("--grid-n must be at least 3");
    if (!(options.tol > 0.0))
        throw ValidationError("--tol must be positive");
}

int run_guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const EvalDomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

std::ostream& sink(const CommandOptions& options, std::ofstream& file, std::ostream& fallback) {
    if (options.out_path.empty())
        return fallback;
    file.open(options.out_path, std::ios::binary);
    if (!file)
        throw ValidationError("cannot open output file '" + options.out_path + "'");
    return file;
}

} // namespace

int cmd_check(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&]() -> int {
        validate_grid(options);
        LoadedModel lm = load_model(options);
        const auto d = resolve_diffusion(lm, options.d_values);
        const CompartmentModel model = lm.model.with_diffusion(d);
        const Grid grid = model.make_grid(options.grid_n);

        out << "model: " << lm.display << "\n";
        bool floor_note = false;
        for (double f : model.sample_floor())
            floor_note = floor_note || f > 0.0;
        if (floor_note)
            out << "note: evaluable region restricted; spot-checks sample above a positive "
                   "floor (total population N > 0)\n";

        DfeState dfe;
        try {
            dfe = solve_dfe(model, grid, options.tol);
        } catch (const Error& e) {
            out << "[FAIL] disease-free steady state: " << e.what() << "\n";
            out << "check: FAIL\n";
            return kExitNumerical;
        }
        out << "[pass] disease-free steady state (" << dfe.method
            << ", residual " << fmt(dfe.residual) << ")\n";

        const AssumptionReport report =
            check_assumptions(model, grid, dfe.values, 20, options.seed);
        out << report.summary();
        out << "check: " << (report.all_passed() ? "PASS" : "FAIL") << "\n";
        return report.all_passed() ? kExitOk : kExitValidation;
    });
}

int cmd_r0(const CommandOptions& options, std::ostream& out, std::ostream& err) {
    return run_guarded(err, [&]() -> int {
        validate_grid(options);
        LoadedModel lm = load_model(options);
        const auto d = resolve_diffusion(lm, options.d_values);
        const CompartmentModel model = lm.model.with_diffusion(d);
        const Grid grid = model.make_grid(options.grid_n);

        const DfeState dfe = solve_dfe(model, grid, options.tol);
        const BlockOperator op(model, grid, dfe);
        const SpectralResult r0 = compute_R0(op, options.tol);
        const SpectralResult sbf = spectral_bound_sparse(op.B_plus_F(), options.tol);

        if (options.format == "json") {
            ordered_json j;
            j["model"] = lm.display;
            j["grid_n"] = options.grid_n;
            j["diffusion"] = d;
            j["R0"] = r0.value;
            j["R0_residual"] = r0.residual;
            j["R0_iterations"] = r0.iterations;
            j["s_B_plus_F"] = sbf.value;
            j["s_B_plus_F_residual"] = sbf.residual;
            j["dfe_method"] = dfe.method;
            j["dfe_residual"] = dfe.residual;
            out << j.dump(2) << "\n";
        } else {
            out << "model: " << lm.display << "\n";
            out << "grid_n: " << options.grid_n << "\n";
            out << "diffusion:";
            for (double v : d)
                out << " " << fmt(v);
            out << "\n";
            out << "R0: " << fmt(r0.value) << "  (residual " << fmt(r0.residual) << ", "
                << r0.iterations << " iterations)\n";
            out << "s(B+F): " << fmt(sbf.value) << "  (residual " << fmt(sbf.residual) << ")\n";
            out << "dfe: " << dfe.method << " (residual " << fmt(dfe.residual) << ", "
                << dfe.iterations << " iterations)\n";
        }
        return kExitOk;
    });
}

int cmd_sweep(const CommandOptions& options, std::ostream& out_stream, std::ostream& err) {
    return run_guarded(err, [&]() -> int {
        validate_grid(options);
        if (options.d_values.empty())
            throw ValidationError("sweep needs a nonempty --d schedule");
        LoadedModel lm = load_model(options);
        const CompartmentModel& model = lm.model;
        const Grid grid = model.make_grid(options.grid_n);

        std::vector<std::vector<double>> schedule;
        for (double v : options.d_values) {
            std::vector<double> tuple = model.diffusion();
            for (int i = 0; i < model.n(); ++i)
                if (lm.sweep_mask[static_cast<std::size_t>(i)])
                    tuple[static_cast<std::size_t>(i)] = v;
            schedule.push_back(std::move(tuple));
        }

        SweepOptions sw;
        sw.tol = options.tol;
        sw.eps_fraction = options.eps_fraction;
        sw.jobs = options.jobs;
        const LimitReport report = sweep(model, grid, schedule, sw);

        std::ofstream file;
        std::ostream& out = sink(options, file, out_stream);

        if (options.format == "json") {
            ordered_json j;
            j["model"] = lm.display;
            j["grid_n"] = options.grid_n;
            ordered_json rows = ordered_json::array();
            for (const auto& pt : report.sweep) {
                ordered_json r;
                r["d"] = pt.diffusion;
                if (pt.failed) {
                    r["error"] = pt.error;
                } else {
                    r["R0"] = pt.R0;
                    r["s_B_plus_F"] = pt.s_B_plus_F;
                    if (report.has_small_limit)
                        r["gap_small"] = std::abs(pt.R0 - report.small_limit);
                    if (report.has_large_limit)
                        r["gap_large"] = std::abs(pt.R0 - report.large_limit);
                    if (pt.has_envelope) {
                        r["envelope_low"] = pt.envelope_low;
                        r["envelope_high"] = pt.envelope_high;
                    }
                }
                rows.push_back(std::move(r));
            }
            j["rows"] = std::move(rows);
            if (report.has_small_limit)
                j["small_limit"] = report.small_limit;
            if (report.has_large_limit)
                j["large_limit"] = report.large_limit;
            if (lm.builtin) {
                j["small_oracle"] = lm.builtin->small_oracle(grid);
                j["large_oracle"] = lm.builtin->large_oracle(grid);
            }
            out << j.dump(2) << "\n";
        } else {
            out << "# model: " << lm.display << ", grid_n: " << options.grid_n << "\n";
            out << "# columns: ";
            for (const auto& name : model.names())
                out << "d_" << name << " ";
            out << "R0 s_B_plus_F gap_small gap_large env_low env_high\n";
            for (const auto& pt : report.sweep) {
                if (pt.failed) {
                    out << "# failed:";
                    for (double v : pt.diffusion)
                        out << " " << fmt(v);
                    out << " : " << pt.error << "\n";
                    continue;
                }
                for (double v : pt.diffusion)
                    out << fmt(v) << " ";
                out << fmt(pt.R0) << " " << fmt(pt.s_B_plus_F) << " ";
                out << (report.has_small_limit ? fmt(std::abs(pt.R0 - report.small_limit))
                                               : std::string("nan"))
                    << " ";
                out << (report.has_large_limit ? fmt(std::abs(pt.R0 - report.large_limit))
                                               : std::string("nan"))
                    << " ";
                if (pt.has_envelope)
                    out << fmt(pt.envelope_low) << " " << fmt(pt.envelope_high) << "\n";
                else
                    out << "nan nan\n";
            }
            out << "# summary\n";
            if (report.has_small_limit)
                out << "# small_limit " << fmt(report.small_limit) << " (argmax node "
                    << report.profile.argmax_node << ")\n";
            if (report.has_large_limit)
                out << "# large_limit " << fmt(report.large_limit) << "\n";
            if (report.has_small_bounds)
                out << "# envelope_small " << fmt(report.small_bounds.first) << " "
                    << fmt(report.small_bounds.second) << " (eps " << fmt(report.eps_small)
                    << ")\n";
            if (report.has_large_bounds)
                out << "# envelope_large " << fmt(report.large_bounds.first) << " "
                    << fmt(report.large_bounds.second) << " (eps " << fmt(report.eps_large)
                    << ")\n";
            if (lm.builtin) {
                out << "# small_oracle " << fmt(lm.builtin->small_oracle(grid)) << "\n";
                out << "# large_oracle " << fmt(lm.builtin->large_oracle(grid)) << "\n";
            }
        }

        for (const auto& pt : report.sweep)
            if (pt.failed)
                return kExitNumerical;
        return kExitOk;
    });
}

int cmd_limits(const CommandOptions& options, std::ostream& out_stream, std::ostream& err) {
    return run_guarded(err, [&]() -> int {
        validate_grid(options);
        LoadedModel lm = load_model(options);
        const CompartmentModel& model = lm.model;
        const Grid grid = model.make_grid(options.grid_n);

        std::ofstream file;
        std::ostream& out = sink(options, file, out_stream);

        out << "model: " << lm.display << "\n";
        if (model.has_dfe_small()) {
            const LocalProfile profile = local_R0_profile(model, grid);
            out << "small_limit: " << fmt(profile.max_value) << " at node "
                << profile.argmax_node << " (x=" << fmt(grid.node(profile.argmax_node)) << ")\n";
            const Eigen::MatrixXd c = dfe_small_limit(model, grid);
            const double eps = options.eps_fraction * c.minCoeff();
            const auto bounds = envelope_bounds(envelopes(model, grid, c, eps));
            out << "envelope_small (eps " << fmt(eps) << "): [" << fmt(bounds.first) << ", "
                << fmt(bounds.second) << "]\n";
        } else {
            out << "small_limit: not declared by the model\n";
        }
        if (model.has_dfe_large()) {
            const AveragedLimit avg = averaged_limit(model, grid);
            out << "large_limit: " << fmt(avg.value);
            if (avg.hypothesis_checked)
                out << (avg.hypothesis_ok ? " (unique nonnegative eigenvector verified)"
                                          : " (WARNING: uniqueness hypothesis failed)");
            else
                out << " (" << avg.note << ")";
            out << "\n";
            const Eigen::VectorXd u_tilde = dfe_large_limit(model, grid);
            Eigen::MatrixXd u_ref(grid.n(), model.n() - model.m());
            for (int i = 0; i < u_ref.cols(); ++i)
                u_ref.col(i).setConstant(u_tilde[i]);
            const double eps = options.eps_fraction * u_tilde.minCoeff();
            const auto bounds = envelope_bounds(envelopes(model, grid, u_ref, eps));
            out << "envelope_large (eps " << fmt(eps) << "): [" << fmt(bounds.first) << ", "
                << fmt(bounds.second) << "]\n";
        } else {
            out << "large_limit: not declared by the model\n";
        }
        if (lm.builtin) {
            out << "small_oracle: " << fmt(lm.builtin->small_oracle(grid)) << "\n";
            out << "large_oracle: " << fmt(lm.builtin->large_oracle(grid)) << "\n";
        }
        return kExitOk;
    });
}

int cmd_simulate(const CommandOptions& options, std::ostream& out_stream, std::ostream& err) {
    return run_guarded(err, [&]() -> int {
        validate_grid(options);
        LoadedModel lm = load_model(options);
        const auto d = resolve_diffusion(lm, options.d_values);
        const CompartmentModel model = lm.model.with_diffusion(d);
        const Grid grid = model.make_grid(options.grid_n);
        const DfeState dfe = solve_dfe(model, grid, options.tol);

        StabilityOptions sim;
        sim.amplitude = options.amplitude;
        sim.T = options.T;
        sim.dt = options.dt;
        sim.expect_growth = options.expect_growth;
        const StabilityReport report = dfe_stability_test(model, grid, dfe, sim);

        std::ofstream file;
        std::ostream& out = sink(options, file, out_stream);
        out << "# model: " << lm.display << ", amplitude: " << fmt(options.amplitude)
            << ", T: " << fmt(options.T) << "\n";
        out << "# columns: t distance_to_dfe infected_sup\n";
        // Thin the series to at most ~200 rows.
        const std::size_t stride = std::max<std::size_t>(1, report.times.size() / 200);
        for (std::size_t i = 0; i < report.times.size(); i += stride)
            out << fmt(report.times[i]) << " " << fmt(report.distances[i]) << " "
                << fmt(report.infected_sup[i]) << "\n";
        if ((report.times.size() - 1) % stride != 0)
            out << fmt(report.times.back()) << " " << fmt(report.distances.back()) << " "
                << fmt(report.infected_sup.back()) << "\n";
        out << "# initial_distance " << fmt(report.initial_distance) << "\n";
        out << "# final_distance " << fmt(report.final_distance) << "\n";
        out << "# half_decay " << (report.half_decay ? "yes" : "no") << "\n";
        out << "# tail_nonincreasing " << (report.tail_nonincreasing ? "yes" : "no") << "\n";
        if (options.expect_growth)
            out << "# infected_grew " << (report.infected_grew ? "yes" : "no") << "\n";
        out << "# result " << (report.passed ? "PASS" : "FAIL") << "\n";
        return report.passed ? kExitOk : kExitNumerical;
    });
}

} // namespace rdr0
