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
#include "rdr0/model_file.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace rdr0 {

namespace {

using nlohmann::json;

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ValidationError("unknown key '" + key + "' in " + where);
}

Expr parse_entry(const json& section, const std::string& section_name, const std::string& comp,
                 const std::vector<std::string>& vocab,
                 const std::map<std::string, double>& params) {
    if (!section.contains(comp))
        return Expr(); // zero
    const json& v = section.at(comp);
    if (!v.is_string())
        throw ValidationError(section_name + "." + comp + " must be an expression string");
    try {
        return parse_expression(v.get<std::string>(), vocab, params);
    } catch (const ParseError& e) {
        throw ValidationError("in " + section_name + "." + comp + ": " + e.what());
    }
}

} // namespace

ModelFile parse_model_text(const std::string& text, const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(source_name + ":" + std::to_string(line) + ":" + std::to_string(col) +
                             ": " + e.what(),
                         e.byte);
    }
    if (!doc.is_object())
        throw ValidationError(source_name + ": model file must be a JSON object");
    reject_unknown_keys(doc,
                        {"domain", "compartments", "diffusion", "params", "F", "Vplus", "Vminus",
                         "dfe_fixed", "dfe_small", "dfe_large"},
                        "the model file");

    for (const char* required : {"domain", "compartments", "diffusion"})
        if (!doc.contains(required))
            throw ValidationError(source_name + ": missing required section '" +
                                  std::string(required) + "'");

    const json& domain = doc.at("domain");
    if (!domain.is_array() || domain.size() != 2 || !domain[0].is_number() ||
        !domain[1].is_number())
        throw ValidationError("domain must be [a, b]");

    const json& comps = doc.at("compartments");
    if (!comps.is_array() || comps.size() < 2)
        throw ValidationError("compartments must list at least two entries");
    std::vector<std::string> names;
    int n_infected = 0;
    bool seen_uninfected = false;
    for (const json& c : comps) {
        if (!c.is_object())
            throw ValidationError("each compartment must be an object");
        reject_unknown_keys(c, {"name", "infected"}, "a compartment entry");
        if (!c.contains("name") || !c.at("name").is_string())
            throw ValidationError("compartment entries need a string 'name'");
        const bool infected = c.value("infected", false);
        if (infected) {
            if (seen_uninfected)
                throw ValidationError(
                    "infected compartments must be listed first (before uninfected ones)");
            ++n_infected;
        } else {
            seen_uninfected = true;
        }
        names.push_back(c.at("name").get<std::string>());
    }

    const json& diff = doc.at("diffusion");
    if (!diff.is_array() || diff.size() != names.size())
        throw ValidationError("diffusion must list one entry per compartment");
    std::vector<double> diffusion;
    std::vector<bool> sweep_mask;
    for (const json& d : diff) {
        if (d.is_string()) {
            if (d.get<std::string>() != "sweep")
                throw ValidationError("diffusion entries are positive numbers or \"sweep\"");
            diffusion.push_back(1.0); // placeholder until a sweep value arrives
            sweep_mask.push_back(true);
        } else if (d.is_number()) {
            diffusion.push_back(d.get<double>());
            sweep_mask.push_back(false);
        } else {
            throw ValidationError("diffusion entries are positive numbers or \"sweep\"");
        }
    }

    std::map<std::string, double> params;
    if (doc.contains("params")) {
        const json& p = doc.at("params");
        if (!p.is_object())
            throw ValidationError("params must be an object of named constants");
        for (const auto& [key, value] : p.items()) {
            if (!value.is_number())
                throw ValidationError("param '" + key + "' must be a number");
            params[key] = value.get<double>();
        }
    }

    std::vector<std::string> vocab{"x"};
    vocab.insert(vocab.end(), names.begin(), names.end());

    for (const char* section : {"F", "Vplus", "Vminus", "dfe_fixed", "dfe_small", "dfe_large"}) {
        if (!doc.contains(section))
            continue;
        const json& s = doc.at(section);
        if (!s.is_object())
            throw ValidationError(std::string(section) + " must map compartment names to strings");
        std::set<std::string> allowed(names.begin(), names.end());
        reject_unknown_keys(s, allowed, std::string("section ") + section);
    }

    CompartmentModel::Setup setup;
    setup.names = names;
    setup.n_infected = n_infected;
    setup.diffusion = std::move(diffusion);
    setup.domain_a = domain[0].get<double>();
    setup.domain_b = domain[1].get<double>();
    const json empty = json::object();
    const json& F = doc.contains("F") ? doc.at("F") : empty;
    const json& Vp = doc.contains("Vplus") ? doc.at("Vplus") : empty;
    const json& Vm = doc.contains("Vminus") ? doc.at("Vminus") : empty;
    for (const auto& name : names) {
        setup.F.push_back(parse_entry(F, "F", name, vocab, params));
        setup.Vplus.push_back(parse_entry(Vp, "Vplus", name, vocab, params));
        setup.Vminus.push_back(parse_entry(Vm, "Vminus", name, vocab, params));
    }
    auto parse_dfe_section = [&](const char* key) {
        std::vector<Expr> out;
        if (!doc.contains(key))
            return out;
        const json& s = doc.at(key);
        for (std::size_t i = static_cast<std::size_t>(n_infected); i < names.size(); ++i) {
            if (!s.contains(names[i]))
                throw ValidationError(std::string(key) + " must cover every uninfected compartment");
            out.push_back(parse_entry(s, key, names[i], vocab, params));
        }
        return out;
    };
    setup.dfe_fixed = parse_dfe_section("dfe_fixed");
    setup.dfe_small = parse_dfe_section("dfe_small");
    if (doc.contains("dfe_large")) {
        const json& s = doc.at("dfe_large");
        for (std::size_t i = static_cast<std::size_t>(n_infected); i < names.size(); ++i) {
            if (!s.contains(names[i]))
                throw ValidationError("dfe_large must cover every uninfected compartment");
            // A declared profile g(x) yields the constant mean(g) = int g / |Omega|.
            setup.dfe_large.emplace_back(parse_entry(s, "dfe_large", names[i], vocab, params),
                                         Expr::constant(1.0));
        }
    }

    ModelFile out{CompartmentModel(std::move(setup)), std::move(sweep_mask), source_name};
    return out;
}

ModelFile load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_text(buf.str(), path);
}

} // namespace rdr0
