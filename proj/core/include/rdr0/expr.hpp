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
#ifndef RDR0_EXPR_HPP
#define RDR0_EXPR_HPP

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rdr0/errors.hpp"

namespace rdr0 {

namespace detail {
struct ExprNode;
}

/// Immutable scalar expression over a space variable and state variables.
///
/// Variables are addressed by slot: slot 0 is the space variable (first
/// vocabulary entry, conventionally "x"), slot i >= 1 is the i-th state
/// variable. Expressions are shared trees; all operations are pure and
/// safe to call concurrently.
class Expr {
public:
    /// The constant 0.
    Expr();

    static Expr constant(double value);
    static Expr variable(int slot, std::string name);

    /// Evaluate at space point `x` with state vector `u` (u[i-1] binds slot i).
    /// Throws EvalDomainError on division by zero, log/sqrt outside their
    /// domain, 0^negative, or a non-finite result.
    double evaluate(double x, std::span<const double> u) const;

    /// Partial derivative with respect to the variable in `slot`,
    /// constant-folded. Formally valid everywhere; evaluation at
    /// non-differentiable points reports a domain violation.
    Expr derivative(int slot) const;

    /// True iff the tree is literally the constant 0 (structural zero).
    bool is_zero() const;

    /// True iff the tree is a single constant; writes it to `value` if given.
    bool is_constant(double* value = nullptr) const;

    /// Highest variable slot referenced, or -1 for a constant expression.
    int max_slot() const;

    /// Infix form that reparses to an equivalent expression.
    std::string to_string() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

    friend Expr sin(const Expr& a);
    friend Expr cos(const Expr& a);
    friend Expr exp(const Expr& a);
    friend Expr log(const Expr& a);
    friend Expr sqrt(const Expr& a);
    friend Expr abs(const Expr& a);
    /// Power with a constant exponent (the only supported form).
    friend Expr pow(const Expr& base, double exponent);

    friend Expr parse_expression(std::string_view text,
                                 const std::vector<std::string>& vocabulary,
                                 const std::map<std::string, double>& constants);

private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const detail::ExprNode> node_;
};

/// Parse an infix expression. `vocabulary` lists every legal variable name;
/// the first entry is the space variable. Precedence, loosest to tightest:
/// `+ -`, `* /`, `^` (constant exponent), unary minus; parentheses and
/// function calls (sin, cos, exp, log, sqrt, abs, neg, pow) as usual;
/// `pi` is a named constant. `constants` supplies extra named constants
/// (model-file params), folded in at parse time.
/// Throws ParseError / UnknownIdentifierError.
Expr parse_expression(std::string_view text, const std::vector<std::string>& vocabulary,
                      const std::map<std::string, double>& constants = {});

} // namespace rdr0

#endif
