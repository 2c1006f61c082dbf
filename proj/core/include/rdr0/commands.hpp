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
#ifndef RDR0_COMMANDS_HPP
#define RDR0_COMMANDS_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace rdr0 {

/// Exit codes: 0 success, 1 validation failure, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

struct CommandOptions {
    std::string model_ref;                      // file path or "builtin:NAME"
    std::map<std::string, std::string> params;  // builtin coefficient overrides
    int grid_n = 257;
    double tol = 1e-10;
    std::vector<double> d_values;               // per-compartment rates or sweep schedule
    double eps_fraction = 0.05;                 // envelope half-width fraction
    std::string out_path;                       // empty: write to `out`
    std::string format = "table";               // "table" | "json"
    int jobs = 1;
    unsigned seed = 20260412;
    // simulate
    double T = 20.0;
    double dt = 0.0;       // 0 -> T/1000
    double amplitude = 1e-3;
    bool expect_growth = false;
};

/// `check`: structural assumptions and DFE solvability; exit 0 iff all pass.
int cmd_check(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// `r0`: basic reproduction number, s(B+F), residuals and iteration counts.
int cmd_r0(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// `sweep`: one row per diffusion value with R0, s(B+F), distances to both
/// limits and envelope bounds; plus a summary block (limits, oracles for
/// built-ins). Deterministic, byte-identical across runs for fixed inputs.
int cmd_sweep(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// `limits`: local R0 profile summary, averaged limit and envelope bounds.
int cmd_limits(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// `simulate`: nonlinear run from a perturbed DFE, tabular time series.
int cmd_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err);

} // namespace rdr0

#endif
