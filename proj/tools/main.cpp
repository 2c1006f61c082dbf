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
#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "rdr0/commands.hpp"

namespace {

// "name=expr" pairs from repeated --param flags.
void apply_params(const std::vector<std::string>& raw, rdr0::CommandOptions& options) {
    for (const auto& p : raw) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CLI::ValidationError("--param expects name=expression, got '" + p + "'");
        options.params[p.substr(0, eq)] = p.substr(eq + 1);
    }
}

void add_common(CLI::App* cmd, rdr0::CommandOptions& options,
                std::vector<std::string>& raw_params) {
    cmd->add_option("--model", options.model_ref, "Model file path or builtin:<name>")
        ->required();
    cmd->add_option("--param", raw_params,
                    "Override a builtin coefficient, name=expression (repeatable)");
    cmd->add_option("--grid-n", options.grid_n, "Grid node count");
    cmd->add_option("--tol", options.tol, "Spectral tolerance");
    cmd->add_option("--d", options.d_values, "Diffusion rates (comma separated)")
        ->delimiter(',');
    cmd->add_option("--eps", options.eps_fraction,
                    "Envelope half-width as a fraction of the reference minimum");
    cmd->add_option("--out", options.out_path, "Write the report to this file");
    cmd->add_option("--format", options.format, "Output format: table or json")
        ->check(CLI::IsMember({"table", "json"}));
    cmd->add_option("--jobs", options.jobs, "Worker threads for sweeps");
    cmd->add_option("--seed", options.seed, "Seed for sampled assumption checks");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Basic reproduction numbers of reaction-diffusion compartmental epidemic "
                 "models: R0, diffusion-limit sweeps, envelope bounds, and stability runs"};
    app.require_subcommand(1);

    rdr0::CommandOptions options;
    std::vector<std::string> raw_params;

    CLI::App* check = app.add_subcommand("check", "Verify model assumptions and DFE solvability");
    add_common(check, options, raw_params);

    CLI::App* r0 = app.add_subcommand("r0", "Compute the basic reproduction number");
    add_common(r0, options, raw_params);

    CLI::App* sweep = app.add_subcommand("sweep", "R0 over a diffusion schedule with limits");
    add_common(sweep, options, raw_params);

    CLI::App* limits = app.add_subcommand("limits", "Asymptotic limits and envelope bounds");
    add_common(limits, options, raw_params);

    CLI::App* simulate = app.add_subcommand("simulate", "Nonlinear run from a perturbed DFE");
    add_common(simulate, options, raw_params);
    simulate->add_option("--T", options.T, "Final time");
    simulate->add_option("--dt", options.dt, "Time step (default T/1000)");
    simulate->add_option("--amplitude", options.amplitude, "Perturbation amplitude");
    simulate->add_flag("--expect-growth", options.expect_growth,
                       "Assert infected growth instead of decay (R0 > 1 illustration)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? rdr0::kExitValidation : rdr0::kExitOk;
    }

    try {
        apply_params(raw_params, options);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return rdr0::kExitValidation;
    }

    if (check->parsed())
        return rdr0::cmd_check(options, std::cout, std::cerr);
    if (r0->parsed())
        return rdr0::cmd_r0(options, std::cout, std::cerr);
    if (sweep->parsed())
        return rdr0::cmd_sweep(options, std::cout, std::cerr);
    if (limits->parsed())
        return rdr0::cmd_limits(options, std::cout, std::cerr);
    if (simulate->parsed())
        return rdr0::cmd_simulate(options, std::cout, std::cerr);
    return rdr0::kExitValidation;
}
