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
#ifndef RDR0_MODEL_FILE_HPP
#define RDR0_MODEL_FILE_HPP

#include <string>
#include <vector>

#include "rdr0/model.hpp"

namespace rdr0 {

/// A model loaded from a JSON model file. Diffusion entries may be the
/// string "sweep", marking rates supplied later (per sweep point or via
/// --d); such entries carry a placeholder rate of 1 in `model`.
struct ModelFile {
    CompartmentModel model;
    std::vector<bool> sweep_mask; // true where diffusion was "sweep"
    std::string source;
};

/// Parse a model document. Sections: "domain" ([a, b]), "compartments"
/// (ordered objects {"name", "infected"}, infected first), "diffusion"
/// (positive numbers or "sweep"), "params" (named constants folded into
/// expressions), "F"/"Vplus"/"Vminus" (per-compartment expression strings,
/// missing entries are zero), optional "dfe_fixed"/"dfe_small"/"dfe_large"
/// expression strings for the uninfected compartments. Unknown keys are
/// rejected. Syntax errors report line and column.
ModelFile parse_model_text(const std::string& text, const std::string& source_name = "<memory>");

/// Load and parse a model file from disk.
ModelFile load_model_file(const std::string& path);

} // namespace rdr0

#endif
