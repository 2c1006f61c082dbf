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
#include "rdr0/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rdr0 {

namespace {

const std::vector<std::string> kSpaceVocab = {"x"};

/// Strict positivity spot-check of a coefficient on [a, b].
void require_positive(const Expr& e, const std::string& what, double a, double b) {
    const std::vector<double> empty;
    for (int k = 0; k <= 32; ++k) {
        const double x = a + (b - a) * k / 32.0;
        double v;
        try {
            v = e.evaluate(x, empty);
        } catch (const EvalDomainError& err) {
            throw ValidationError("coefficient " + what + " not evaluable at x=" +
                                  std::to_string(x) + ": " + err.what());
        }
        if (!(v > 0.0))
            throw ValidationError("coefficient " + what + " must be strictly positive; value " +
                                  std::to_string(v) + " at x=" + std::to_string(x));
    }
}

double eval_coeff(const Expr& e, double x) {
    const std::vector<double> empty;
    return e.evaluate(x, empty);
}

double integral_of(const Expr& e, const Grid& grid) {
    return integrate(grid, grid.sample([&](double x) { return eval_coeff(e, x); }));
}

double grid_max(const std::function<double(double)>& f, const Grid& grid) {
    double best = f(grid.node(0));
    for (int k = 1; k < grid.n(); ++k)
        best = std::max(best, f(grid.node(k)));
    return best;
}

Expr parse_coeff(const std::string& text, const std::string& what) {
    try {
        return parse_expression(text, kSpaceVocab);
    } catch (const ParseError& e) {
        throw ValidationError("bad expression for " + what + ": " + e.what());
    }
}

} // namespace

BuiltinModel make_sis(const Expr& beta, const Expr& gamma, double Ntotal,
                      std::array<double, 2> diffusion, double a, double b) {
    require_positive(beta, "beta", a, b);
    require_positive(gamma, "gamma", a, b);
    if (!(Ntotal > 0.0))
        throw ValidationError("Ntotal must be positive");

    const double S_hat = Ntotal / (b - a);
    const Expr I = Expr::variable(1, "I");
    const Expr S = Expr::variable(2, "S");
    const Expr zero;

    CompartmentModel::Setup s;
    s.names = {"I", "S"};
    s.n_infected = 1;
    s.diffusion = {diffusion[0], diffusion[1]};
    s.domain_a = a;
    s.domain_b = b;
    s.F = {beta * S * I, zero};
    s.Vplus = {zero, gamma * I};
    s.Vminus = {gamma * I, beta * S * I};
    s.dfe_fixed = {Expr::constant(S_hat)};
    s.dfe_small = {Expr::constant(S_hat)};
    s.dfe_large = {{Expr::constant(S_hat), Expr::constant(1.0)}};

    BuiltinModel out{"sis", CompartmentModel(std::move(s)), {}, {}, {}};
    out.local_oracle = [beta, gamma, S_hat](double x) {
        return eval_coeff(beta, x) * S_hat / eval_coeff(gamma, x);
    };
    out.small_oracle = [local = out.local_oracle](const Grid& g) { return grid_max(local, g); };
    out.large_oracle = [beta, gamma, S_hat](const Grid& g) {
        return S_hat * integral_of(beta, g) / integral_of(gamma, g);
    };
    return out;
}

BuiltinModel make_zika(const ZikaParams& p, std::array<double, 3> diffusion, double a, double b) {
    require_positive(p.lambda, "lambda", a, b);
    require_positive(p.sigma1, "sigma1", a, b);
    require_positive(p.sigma2, "sigma2", a, b);
    require_positive(p.mu, "mu", a, b);
    require_positive(p.beta, "beta", a, b);
    require_positive(p.Hu, "Hu", a, b);

    // (u1, u2, u3) = (infected hosts, infected vectors, uninfected vectors)
    const Expr Hi = Expr::variable(1, "Hi");
    const Expr Vi = Expr::variable(2, "Vi");
    const Expr Vu = Expr::variable(3, "Vu");
    const Expr zero;

    CompartmentModel::Setup s;
    s.names = {"Hi", "Vi", "Vu"};
    s.n_infected = 2;
    s.diffusion = {diffusion[0], diffusion[1], diffusion[2]};
    s.domain_a = a;
    s.domain_b = b;
    // New infections feed the infected-vector row only (rank-one F); the
    // host infection term sigma1*Hu*Vi enters as transfer-in.
    s.F = {zero, p.sigma2 * Vu * Hi, zero};
    s.Vplus = {p.sigma1 * p.Hu * Vi, zero, p.beta * (Vi + Vu)};
    s.Vminus = {p.lambda * Hi, p.mu * (Vi + Vu) * Vi, p.sigma2 * Vu * Hi + p.mu * (Vi + Vu) * Vu};
    s.dfe_small = {p.beta / p.mu};
    s.dfe_large = {{p.beta, p.mu}};

    BuiltinModel out{"zika", CompartmentModel(std::move(s)), {}, {}, {}};
    const ZikaParams cp = p;
    out.local_oracle = [cp](double x) {
        return eval_coeff(cp.sigma1, x) * eval_coeff(cp.sigma2, x) * eval_coeff(cp.Hu, x) /
               (eval_coeff(cp.lambda, x) * eval_coeff(cp.mu, x));
    };
    out.small_oracle = [local = out.local_oracle](const Grid& g) { return grid_max(local, g); };
    out.large_oracle = [cp](const Grid& g) {
        return integral_of(cp.sigma1 * cp.Hu, g) * integral_of(cp.sigma2, g) /
               (integral_of(cp.lambda, g) * integral_of(cp.mu, g));
    };
    return out;
}

BuiltinModel make_vector_host(const VectorHostParams& p, std::array<double, 4> diffusion, double a,
                              double b) {
    require_positive(p.lambda1, "lambda1", a, b);
    require_positive(p.lambda2, "lambda2", a, b);
    require_positive(p.beta_s, "beta_s", a, b);
    require_positive(p.beta_m, "beta_m", a, b);
    require_positive(p.b, "b", a, b);
    require_positive(p.gamma, "gamma", a, b);
    require_positive(p.c, "c", a, b);

    // (u1, u2, u3, u4) = (infected hosts, infected vectors, susceptible
    // hosts, susceptible vectors)
    const Expr I = Expr::variable(1, "I");
    const Expr V = Expr::variable(2, "V");
    const Expr S = Expr::variable(3, "S");
    const Expr M = Expr::variable(4, "M");
    const Expr zero;

    CompartmentModel::Setup s;
    s.names = {"I", "V", "S", "M"};
    s.n_infected = 2;
    s.diffusion = {diffusion[0], diffusion[1], diffusion[2], diffusion[3]};
    s.domain_a = a;
    s.domain_b = b;
    s.F = {p.beta_s * S * V, p.beta_m * M * I, zero, zero};
    s.Vplus = {zero, zero, p.lambda1 + p.gamma * I, p.lambda2};
    s.Vminus = {(p.b + p.gamma) * I, p.c * V, p.b * S + p.beta_s * S * V,
                p.c * M + p.beta_m * M * I};
    s.dfe_small = {p.lambda1 / p.b, p.lambda2 / p.c};
    s.dfe_large = {{p.lambda1, p.b}, {p.lambda2, p.c}};

    BuiltinModel out{"vector_host", CompartmentModel(std::move(s)), {}, {}, {}};
    const VectorHostParams cp = p;
    out.local_oracle = [cp](double x) {
        const double bb = eval_coeff(cp.b, x);
        const double cc = eval_coeff(cp.c, x);
        return std::sqrt(eval_coeff(cp.lambda1, x) * eval_coeff(cp.lambda2, x) *
                         eval_coeff(cp.beta_s, x) * eval_coeff(cp.beta_m, x) /
                         (bb * cc * cc * (bb + eval_coeff(cp.gamma, x))));
    };
    out.small_oracle = [local = out.local_oracle](const Grid& g) { return grid_max(local, g); };
    out.large_oracle = [cp](const Grid& g) {
        const double ib = integral_of(cp.b, g);
        const double ic = integral_of(cp.c, g);
        return std::sqrt(integral_of(cp.lambda1, g) * integral_of(cp.lambda2, g) *
                         integral_of(cp.beta_s, g) * integral_of(cp.beta_m, g) /
                         (ib * ic * ic * integral_of(cp.b + cp.gamma, g)));
    };
    return out;
}

BuiltinModel make_staged(int m, const StagedParams& p, double alpha, std::vector<double> diffusion,
                         double a, double b) {
    if (m < 1)
        throw ValidationError("staged model needs at least one infected stage");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ValidationError("alpha must lie in [0, 1]");
    if (static_cast<int>(p.beta.size()) != m || static_cast<int>(p.nu.size()) != m ||
        static_cast<int>(p.gamma.size()) != m)
        throw ValidationError("staged model needs m beta, nu and gamma coefficients");
    for (int j = 0; j < m; ++j) {
        require_positive(p.beta[j], "beta_" + std::to_string(j + 1), a, b);
        require_positive(p.nu[j], "nu_" + std::to_string(j + 1), a, b);
        require_positive(p.gamma[j], "gamma_" + std::to_string(j + 1), a, b);
    }
    require_positive(p.lambda, "lambda", a, b);
    require_positive(p.b, "b", a, b);
    if (diffusion.empty())
        diffusion.assign(static_cast<std::size_t>(m + 1), 1.0);
    if (static_cast<int>(diffusion.size()) != m + 1)
        throw ValidationError("staged model needs m+1 diffusion rates");

    CompartmentModel::Setup s;
    for (int j = 1; j <= m; ++j)
        s.names.push_back("I" + std::to_string(j));
    s.names.push_back("S");
    s.n_infected = m;
    s.diffusion = std::move(diffusion);
    s.domain_a = a;
    s.domain_b = b;

    std::vector<Expr> stage(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
        stage[static_cast<std::size_t>(j)] = Expr::variable(j + 1, s.names[static_cast<std::size_t>(j)]);
    const Expr S = Expr::variable(m + 1, "S");

    Expr total_pop = S;
    for (int j = 0; j < m; ++j)
        total_pop = total_pop + stage[static_cast<std::size_t>(j)];
    const Expr hN = pow(total_pop, -alpha); // h(N), singular at N = 0 for alpha > 0
    Expr force = p.beta[0] * stage[0];
    for (int j = 1; j < m; ++j)
        force = force + p.beta[static_cast<std::size_t>(j)] * stage[static_cast<std::size_t>(j)];
    const Expr incidence = hN * force * S;
    const Expr zero;

    s.F.assign(static_cast<std::size_t>(m + 1), zero);
    s.Vplus.assign(static_cast<std::size_t>(m + 1), zero);
    s.Vminus.assign(static_cast<std::size_t>(m + 1), zero);
    s.F[0] = incidence;
    s.Vminus[0] = (p.nu[0] + p.gamma[0]) * stage[0];
    for (int i = 1; i < m; ++i) {
        s.Vminus[static_cast<std::size_t>(i)] =
            (p.nu[static_cast<std::size_t>(i)] + p.gamma[static_cast<std::size_t>(i)]) *
            stage[static_cast<std::size_t>(i)];
        s.Vplus[static_cast<std::size_t>(i)] =
            p.nu[static_cast<std::size_t>(i - 1)] * stage[static_cast<std::size_t>(i - 1)];
    }
    s.Vminus[static_cast<std::size_t>(m)] = p.b * S + incidence;
    s.Vplus[static_cast<std::size_t>(m)] = p.lambda;
    s.dfe_small = {p.lambda / p.b};
    s.dfe_large = {{p.lambda, p.b}};
    // Keep N > 0 in assumption spot-checks: h(N) = N^-alpha blows up at 0.
    s.sample_floor.assign(static_cast<std::size_t>(m + 1), 0.0);
    s.sample_floor[static_cast<std::size_t>(m)] = 1e-2;

    BuiltinModel out{"staged", CompartmentModel(std::move(s)), {}, {}, {}};
    const StagedParams cp = p;
    const int mm = m;
    const double al = alpha;
    out.local_oracle = [cp, mm, al](double x) {
        double sum = 0.0;
        double chain = 1.0; // prod_{k<j} nu_k / prod_{k<=j} (nu_k+gamma_k)
        for (int j = 0; j < mm; ++j) {
            if (j > 0)
                chain *= eval_coeff(cp.nu[static_cast<std::size_t>(j - 1)], x);
            chain /= eval_coeff(cp.nu[static_cast<std::size_t>(j)], x) +
                     eval_coeff(cp.gamma[static_cast<std::size_t>(j)], x);
            sum += eval_coeff(cp.beta[static_cast<std::size_t>(j)], x) * chain;
        }
        const double ratio = eval_coeff(cp.lambda, x) / eval_coeff(cp.b, x);
        return sum * ratio * std::pow(ratio, -al);
    };
    out.small_oracle = [local = out.local_oracle](const Grid& g) { return grid_max(local, g); };
    out.large_oracle = [cp, mm, al](const Grid& g) {
        double sum = 0.0;
        for (int j = 0; j < mm; ++j) {
            double term = integral_of(cp.beta[static_cast<std::size_t>(j)], g);
            for (int k = 0; k < j; ++k)
                term *= integral_of(cp.nu[static_cast<std::size_t>(k)], g);
            for (int k = 0; k <= j; ++k)
                term /= integral_of(cp.nu[static_cast<std::size_t>(k)] +
                                        cp.gamma[static_cast<std::size_t>(k)],
                                    g);
            sum += term;
        }
        const double ratio = integral_of(cp.lambda, g) / integral_of(cp.b, g);
        return sum * ratio * std::pow(ratio, -al);
    };
    return out;
}

std::vector<std::string> builtin_names() { return {"sis", "zika", "vector_host", "staged"}; }

BuiltinModel make_builtin(const std::string& name,
                          const std::map<std::string, std::string>& overrides) {
    auto text = [&overrides](const std::string& key, const std::string& fallback) {
        auto it = overrides.find(key);
        return it == overrides.end() ? fallback : it->second;
    };
    auto scalar = [&](const std::string& key, double fallback) {
        auto it = overrides.find(key);
        if (it == overrides.end())
            return fallback;
        double v;
        if (!parse_coeff(it->second, key).is_constant(&v))
            throw ValidationError("parameter " + key + " must be a constant");
        return v;
    };
    auto known = [&](std::initializer_list<const char*> keys) {
        for (const auto& [k, _] : overrides) {
            if (std::find_if(keys.begin(), keys.end(),
                             [&k](const char* s) { return k == s; }) == keys.end() &&
                !(k.size() > 5 && k.compare(0, 5, "beta_") == 0) &&
                !(k.size() > 3 && k.compare(0, 3, "nu_") == 0) &&
                !(k.size() > 6 && k.compare(0, 6, "gamma_") == 0))
                throw ValidationError("unknown parameter '" + k + "' for builtin " + name);
        }
    };

    if (name == "sis") {
        known({"beta", "gamma", "Ntotal"});
        return make_sis(parse_coeff(text("beta", "2 + cos(pi*x)"), "beta"),
                        parse_coeff(text("gamma", "1"), "gamma"), scalar("Ntotal", 1.0));
    }
    if (name == "zika") {
        known({"lambda", "sigma1", "sigma2", "mu", "beta", "Hu"});
        ZikaParams p{parse_coeff(text("lambda", "1"), "lambda"),
                     parse_coeff(text("sigma1", "1"), "sigma1"),
                     parse_coeff(text("sigma2", "1"), "sigma2"),
                     parse_coeff(text("mu", "1"), "mu"),
                     parse_coeff(text("beta", "1"), "beta"),
                     parse_coeff(text("Hu", "2"), "Hu")};
        return make_zika(p);
    }
    if (name == "vector_host") {
        known({"lambda1", "lambda2", "beta_s", "beta_m", "b", "gamma", "c"});
        VectorHostParams p{parse_coeff(text("lambda1", "1"), "lambda1"),
                           parse_coeff(text("lambda2", "1"), "lambda2"),
                           parse_coeff(text("beta_s", "1"), "beta_s"),
                           parse_coeff(text("beta_m", "1"), "beta_m"),
                           parse_coeff(text("b", "1"), "b"),
                           parse_coeff(text("gamma", "1"), "gamma"),
                           parse_coeff(text("c", "1"), "c")};
        return make_vector_host(p);
    }
    if (name == "staged") {
        known({"lambda", "b", "alpha", "m"});
        const int m = static_cast<int>(scalar("m", 3));
        StagedParams p;
        for (int j = 1; j <= m; ++j) {
            const std::string sj = std::to_string(j);
            p.beta.push_back(parse_coeff(text("beta_" + sj, "1"), "beta_" + sj));
            p.nu.push_back(parse_coeff(text("nu_" + sj, "1"), "nu_" + sj));
            p.gamma.push_back(parse_coeff(text("gamma_" + sj, "1"), "gamma_" + sj));
        }
        p.lambda = parse_coeff(text("lambda", "1"), "lambda");
        p.b = parse_coeff(text("b", "1"), "b");
        return make_staged(m, p, scalar("alpha", 0.0));
    }
    std::ostringstream os;
    os << "unknown builtin model '" << name << "'; available:";
    for (const auto& n : builtin_names())
        os << " " << n;
    throw ValidationError(os.str());
}

} // namespace rdr0
