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
#include "rdr0/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

namespace rdr0 {
namespace detail {

enum class UnOp { Neg, Sin, Cos, Exp, Log, Sqrt, Abs };
enum class BinOp { Add, Sub, Mul, Div };

struct ExprNode {
    enum class Kind { Constant, Variable, Unary, Binary, PowConst } kind;

    double value = 0.0; // Constant payload, or the exponent of PowConst
    int slot = -1;
    std::string name;
    UnOp uop = UnOp::Neg;
    BinOp bop = BinOp::Add;
    std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

NodePtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Constant;
    n->value = v;
    return n;
}

NodePtr make_var(int slot, std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->slot = slot;
    n->name = std::move(name);
    return n;
}

bool is_const(const NodePtr& n, double* v = nullptr) {
    if (n->kind != ExprNode::Kind::Constant)
        return false;
    if (v)
        *v = n->value;
    return true;
}

bool is_const_eq(const NodePtr& n, double v) {
    double c;
    return is_const(n, &c) && c == v;
}

double eval_unary(UnOp op, double v) {
    switch (op) {
    case UnOp::Neg: return -v;
    case UnOp::Sin: return std::sin(v);
    case UnOp::Cos: return std::cos(v);
    case UnOp::Exp: return std::exp(v);
    case UnOp::Log:
        if (v <= 0.0)
            throw EvalDomainError(EvalFault::LogNonpositive, "log");
        return std::log(v);
    case UnOp::Sqrt:
        if (v < 0.0)
            throw EvalDomainError(EvalFault::SqrtNegative, "sqrt");
        return std::sqrt(v);
    case UnOp::Abs: return std::abs(v);
    }
    return 0.0;
}

double eval_pow(double base, double expo) {
    if (base == 0.0 && expo < 0.0)
        throw EvalDomainError(EvalFault::PowDomain, "pow: 0 raised to a negative exponent");
    if (base < 0.0 && expo != std::floor(expo))
        throw EvalDomainError(EvalFault::PowDomain, "pow: negative base with non-integer exponent");
    return std::pow(base, expo);
}

NodePtr make_unary(UnOp op, NodePtr a) {
    double v;
    if (is_const(a, &v)) {
        // Fold only when the function is defined there; otherwise keep the
        // node so evaluation reports the violation.
        try {
            return make_const(eval_unary(op, v));
        } catch (const EvalDomainError&) {
        }
    }
    if (op == UnOp::Neg && a->kind == ExprNode::Kind::Unary && a->uop == UnOp::Neg)
        return a->a;
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Unary;
    n->uop = op;
    n->a = std::move(a);
    return n;
}

NodePtr make_binary(BinOp op, NodePtr a, NodePtr b) {
    double va, vb;
    const bool ca = is_const(a, &va), cb = is_const(b, &vb);
    switch (op) {
    case BinOp::Add:
        if (ca && cb)
            return make_const(va + vb);
        if (ca && va == 0.0)
            return b;
        if (cb && vb == 0.0)
            return a;
        break;
    case BinOp::Sub:
        if (ca && cb)
            return make_const(va - vb);
        if (cb && vb == 0.0)
            return a;
        if (ca && va == 0.0)
            return make_unary(UnOp::Neg, std::move(b));
        break;
    case BinOp::Mul:
        if (ca && cb)
            return make_const(va * vb);
        if ((ca && va == 0.0) || (cb && vb == 0.0))
            return make_const(0.0);
        if (ca && va == 1.0)
            return b;
        if (cb && vb == 1.0)
            return a;
        break;
    case BinOp::Div:
        if (ca && va == 0.0)
            return make_const(0.0);
        if (ca && cb && vb != 0.0)
            return make_const(va / vb);
        if (cb && vb == 1.0)
            return a;
        break;
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->bop = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_pow(NodePtr a, double expo) {
    double va;
    if (expo == 0.0)
        return make_const(1.0); // 0^0 = 1 by convention
    if (expo == 1.0)
        return a;
    if (is_const(a, &va)) {
        try {
            return make_const(eval_pow(va, expo));
        } catch (const EvalDomainError&) {
        }
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::PowConst;
    n->value = expo;
    n->a = std::move(a);
    return n;
}

double eval_node(const ExprNode& n, double x, std::span<const double> u) {
    switch (n.kind) {
    case ExprNode::Kind::Constant:
        return n.value;
    case ExprNode::Kind::Variable:
        if (n.slot == 0)
            return x;
        if (n.slot - 1 >= static_cast<int>(u.size()))
            throw ValidationError("state vector too short for variable '" + n.name + "'");
        return u[static_cast<std::size_t>(n.slot - 1)];
    case ExprNode::Kind::Unary:
        return eval_unary(n.uop, eval_node(*n.a, x, u));
    case ExprNode::Kind::Binary: {
        const double a = eval_node(*n.a, x, u);
        const double b = eval_node(*n.b, x, u);
        switch (n.bop) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div:
            if (b == 0.0)
                throw EvalDomainError(EvalFault::DivisionByZero, "division");
            return a / b;
        }
        return 0.0;
    }
    case ExprNode::Kind::PowConst:
        return eval_pow(eval_node(*n.a, x, u), n.value);
    }
    return 0.0;
}

NodePtr diff_node(const NodePtr& n, int slot) {
    switch (n->kind) {
    case ExprNode::Kind::Constant:
        return make_const(0.0);
    case ExprNode::Kind::Variable:
        return make_const(n->slot == slot ? 1.0 : 0.0);
    case ExprNode::Kind::Unary: {
        NodePtr da = diff_node(n->a, slot);
        switch (n->uop) {
        case UnOp::Neg: return make_unary(UnOp::Neg, std::move(da));
        case UnOp::Sin: return make_binary(BinOp::Mul, make_unary(UnOp::Cos, n->a), std::move(da));
        case UnOp::Cos:
            return make_binary(BinOp::Mul,
                               make_unary(UnOp::Neg, make_unary(UnOp::Sin, n->a)),
                               std::move(da));
        case UnOp::Exp: return make_binary(BinOp::Mul, make_unary(UnOp::Exp, n->a), std::move(da));
        case UnOp::Log: return make_binary(BinOp::Div, std::move(da), n->a);
        case UnOp::Sqrt:
            return make_binary(BinOp::Div, std::move(da),
                               make_binary(BinOp::Mul, make_const(2.0),
                                           make_unary(UnOp::Sqrt, n->a)));
        case UnOp::Abs:
            // Formal derivative a/|a| * a'; evaluation at a = 0 reports
            // a division-by-zero domain violation.
            return make_binary(BinOp::Mul,
                               make_binary(BinOp::Div, n->a, make_unary(UnOp::Abs, n->a)),
                               std::move(da));
        }
        return make_const(0.0);
    }
    case ExprNode::Kind::Binary: {
        NodePtr da = diff_node(n->a, slot);
        NodePtr db = diff_node(n->b, slot);
        switch (n->bop) {
        case BinOp::Add: return make_binary(BinOp::Add, std::move(da), std::move(db));
        case BinOp::Sub: return make_binary(BinOp::Sub, std::move(da), std::move(db));
        case BinOp::Mul:
            return make_binary(BinOp::Add,
                               make_binary(BinOp::Mul, std::move(da), n->b),
                               make_binary(BinOp::Mul, n->a, std::move(db)));
        case BinOp::Div:
            return make_binary(
                BinOp::Div,
                make_binary(BinOp::Sub,
                            make_binary(BinOp::Mul, std::move(da), n->b),
                            make_binary(BinOp::Mul, n->a, std::move(db))),
                make_binary(BinOp::Mul, n->b, n->b));
        }
        return make_const(0.0);
    }
    case ExprNode::Kind::PowConst: {
        NodePtr da = diff_node(n->a, slot);
        return make_binary(BinOp::Mul,
                           make_binary(BinOp::Mul, make_const(n->value),
                                       make_pow(n->a, n->value - 1.0)),
                           std::move(da));
    }
    }
    return make_const(0.0);
}

int max_slot_node(const ExprNode& n) {
    switch (n.kind) {
    case ExprNode::Kind::Constant: return -1;
    case ExprNode::Kind::Variable: return n.slot;
    case ExprNode::Kind::Unary:
    case ExprNode::Kind::PowConst: return max_slot_node(*n.a);
    case ExprNode::Kind::Binary:
        return std::max(max_slot_node(*n.a), max_slot_node(*n.b));
    }
    return -1;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Precedence: 1 = +,-; 2 = *,/; 3 = ^; 4 = unary minus and atoms.
int node_level(const ExprNode& n) {
    switch (n.kind) {
    case ExprNode::Kind::Binary:
        return (n.bop == BinOp::Add || n.bop == BinOp::Sub) ? 1 : 2;
    case ExprNode::Kind::PowConst:
        return 3;
    case ExprNode::Kind::Constant:
        return n.value < 0.0 ? 3 : 4; // negative constants print with a minus
    default:
        return 4;
    }
}

void print_node(const ExprNode& n, std::string& out);

void print_child(const ExprNode& child, int min_level, std::string& out) {
    if (node_level(child) < min_level) {
        out += '(';
        print_node(child, out);
        out += ')';
    } else {
        print_node(child, out);
    }
}

void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
    case ExprNode::Kind::Constant:
        out += format_double(n.value);
        return;
    case ExprNode::Kind::Variable:
        out += n.name;
        return;
    case ExprNode::Kind::Unary:
        if (n.uop == UnOp::Neg) {
            out += '-';
            print_child(*n.a, 4, out);
            return;
        }
        switch (n.uop) {
        case UnOp::Sin: out += "sin"; break;
        case UnOp::Cos: out += "cos"; break;
        case UnOp::Exp: out += "exp"; break;
        case UnOp::Log: out += "log"; break;
        case UnOp::Sqrt: out += "sqrt"; break;
        case UnOp::Abs: out += "abs"; break;
        default: break;
        }
        out += '(';
        print_node(*n.a, out);
        out += ')';
        return;
    case ExprNode::Kind::Binary: {
        const int lvl = node_level(n);
        print_child(*n.a, lvl, out);
        switch (n.bop) {
        case BinOp::Add: out += " + "; break;
        case BinOp::Sub: out += " - "; break;
        case BinOp::Mul: out += "*"; break;
        case BinOp::Div: out += "/"; break;
        }
        // Right child needs a strictly higher level for - and /.
        print_child(*n.b, (n.bop == BinOp::Sub || n.bop == BinOp::Div) ? lvl + 1 : lvl, out);
        return;
    }
    case ExprNode::Kind::PowConst:
        print_child(*n.a, 4, out);
        out += '^';
        if (n.value < 0.0) {
            out += '(';
            out += format_double(n.value);
            out += ')';
        } else {
            out += format_double(n.value);
        }
        return;
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Token {
    enum class Kind { Number, Ident, Symbol, End } kind;
    std::string text;
    double number = 0.0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_])))
            ++i_;
        tok_.pos = i_;
        if (i_ >= text_.size()) {
            tok_.kind = Token::Kind::End;
            tok_.text.clear();
            return;
        }
        const char c = text_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i_ + 1 < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[i_ + 1])))) {
            std::size_t j = i_;
            while (j < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[j])) || text_[j] == '.'))
                ++j;
            if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text_.size() && (text_[k] == '+' || text_[k] == '-'))
                    ++k;
                if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
                    while (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k])))
                        ++k;
                    j = k;
                }
            }
            tok_.kind = Token::Kind::Number;
            tok_.text = std::string(text_.substr(i_, j - i_));
            try {
                tok_.number = std::stod(tok_.text);
            } catch (const std::exception&) {
                throw ParseError("malformed number '" + tok_.text + "'", i_);
            }
            i_ = j;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[j])) ||
                                        text_[j] == '_'))
                ++j;
            tok_.kind = Token::Kind::Ident;
            tok_.text = std::string(text_.substr(i_, j - i_));
            i_ = j;
            return;
        }
        if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
            tok_.kind = Token::Kind::Symbol;
            tok_.text = std::string(1, c);
            ++i_;
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", i_);
    }

    std::string_view text_;
    std::size_t i_ = 0;
    Token tok_;
};

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vocab,
           const std::map<std::string, double>& constants)
        : lex_(text), vocab_(vocab), constants_(constants) {}

    NodePtr parse() {
        NodePtr e = parse_sum();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End)
            throw ParseError("unexpected trailing input '" + t.text + "'", t.pos);
        return e;
    }

private:
    bool accept_symbol(std::string_view s) {
        if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == s) {
            lex_.next();
            return true;
        }
        return false;
    }

    void expect_symbol(std::string_view s) {
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::Symbol || t.text != s)
            throw ParseError("expected '" + std::string(s) + "'", t.pos);
        lex_.next();
    }

    NodePtr parse_sum() {
        NodePtr e = parse_product();
        for (;;) {
            if (accept_symbol("+"))
                e = make_binary(BinOp::Add, std::move(e), parse_product());
            else if (accept_symbol("-"))
                e = make_binary(BinOp::Sub, std::move(e), parse_product());
            else
                return e;
        }
    }

    NodePtr parse_product() {
        NodePtr e = parse_power();
        for (;;) {
            if (accept_symbol("*"))
                e = make_binary(BinOp::Mul, std::move(e), parse_power());
            else if (accept_symbol("/"))
                e = make_binary(BinOp::Div, std::move(e), parse_power());
            else
                return e;
        }
    }

    NodePtr parse_power() {
        NodePtr base = parse_unary();
        if (accept_symbol("^")) {
            const std::size_t pos = lex_.peek().pos;
            NodePtr expo = parse_power(); // right-associative
            double v;
            if (!is_const(expo, &v))
                throw ParseError("exponent must be a constant", pos);
            return make_pow(std::move(base), v);
        }
        return base;
    }

    NodePtr parse_unary() {
        if (accept_symbol("-"))
            return make_unary(UnOp::Neg, parse_unary());
        if (accept_symbol("+"))
            return parse_unary();
        return parse_atom();
    }

    NodePtr parse_atom() {
        const Token t = lex_.next();
        switch (t.kind) {
        case Token::Kind::Number:
            return make_const(t.number);
        case Token::Kind::Ident:
            return resolve_ident(t);
        case Token::Kind::Symbol:
            if (t.text == "(") {
                NodePtr e = parse_sum();
                expect_symbol(")");
                return e;
            }
            throw ParseError("unexpected '" + t.text + "'", t.pos);
        case Token::Kind::End:
            throw ParseError("unexpected end of input", t.pos);
        }
        throw ParseError("unexpected token", t.pos);
    }

    NodePtr resolve_ident(const Token& t) {
        if (lex_.peek().kind == Token::Kind::Symbol && lex_.peek().text == "(")
            return parse_call(t);
        if (t.text == "pi")
            return make_const(std::numbers::pi);
        for (std::size_t i = 0; i < vocab_.size(); ++i) {
            if (vocab_[i] == t.text)
                return make_var(static_cast<int>(i), t.text);
        }
        if (auto it = constants_.find(t.text); it != constants_.end())
            return make_const(it->second);
        throw UnknownIdentifierError(t.text, t.pos);
    }

    NodePtr parse_call(const Token& name) {
        expect_symbol("(");
        NodePtr arg = parse_sum();
        if (name.text == "pow") {
            expect_symbol(",");
            const std::size_t pos = lex_.peek().pos;
            NodePtr expo = parse_sum();
            expect_symbol(")");
            double v;
            if (!is_const(expo, &v))
                throw ParseError("pow exponent must be a constant", pos);
            return make_pow(std::move(arg), v);
        }
        expect_symbol(")");
        if (name.text == "neg")
            return make_unary(UnOp::Neg, std::move(arg));
        if (name.text == "sin")
            return make_unary(UnOp::Sin, std::move(arg));
        if (name.text == "cos")
            return make_unary(UnOp::Cos, std::move(arg));
        if (name.text == "exp")
            return make_unary(UnOp::Exp, std::move(arg));
        if (name.text == "log")
            return make_unary(UnOp::Log, std::move(arg));
        if (name.text == "sqrt")
            return make_unary(UnOp::Sqrt, std::move(arg));
        if (name.text == "abs")
            return make_unary(UnOp::Abs, std::move(arg));
        throw UnknownIdentifierError(name.text, name.pos);
    }

    Lexer lex_;
    const std::vector<std::string>& vocab_;
    const std::map<std::string, double>& constants_;
};

} // namespace
} // namespace detail

Expr::Expr() : node_(detail::make_const(0.0)) {}

Expr Expr::constant(double value) { return Expr(detail::make_const(value)); }

Expr Expr::variable(int slot, std::string name) {
    if (slot < 0)
        throw ValidationError("variable slot must be nonnegative");
    return Expr(detail::make_var(slot, std::move(name)));
}

double Expr::evaluate(double x, std::span<const double> u) const {
    const double v = detail::eval_node(*node_, x, u);
    if (!std::isfinite(v))
        throw EvalDomainError(EvalFault::NonFinite, "expression evaluation");
    return v;
}

Expr Expr::derivative(int slot) const { return Expr(detail::diff_node(node_, slot)); }

bool Expr::is_zero() const { return detail::is_const_eq(node_, 0.0); }

bool Expr::is_constant(double* value) const { return detail::is_const(node_, value); }

int Expr::max_slot() const { return detail::max_slot_node(*node_); }

std::string Expr::to_string() const {
    std::string out;
    detail::print_node(*node_, out);
    return out;
}

Expr operator+(const Expr& a, const Expr& b) {
    return Expr(detail::make_binary(detail::BinOp::Add, a.node_, b.node_));
}
Expr operator-(const Expr& a, const Expr& b) {
    return Expr(detail::make_binary(detail::BinOp::Sub, a.node_, b.node_));
}
Expr operator*(const Expr& a, const Expr& b) {
    return Expr(detail::make_binary(detail::BinOp::Mul, a.node_, b.node_));
}
Expr operator/(const Expr& a, const Expr& b) {
    return Expr(detail::make_binary(detail::BinOp::Div, a.node_, b.node_));
}
Expr operator-(const Expr& a) { return Expr(detail::make_unary(detail::UnOp::Neg, a.node_)); }

Expr sin(const Expr& a) { return Expr(detail::make_unary(detail::UnOp::Sin, a.node_)); }
Expr cos(const Expr& a) { return Expr(detail::make_unary(detail::UnOp::Cos, a.node_)); }
Expr exp(const Expr& a) { return Expr(detail::make_unary(detail::UnOp::Exp, a.node_)); }
Expr log(const Expr& a) { return Expr(detail::make_unary(detail::UnOp::Log, a.node_)); }
Expr sqrt(const Expr& a) { return Expr(detail::make_unary(detail::UnOp::Sqrt, a.node_)); }
Expr abs(const Expr& a) { return Expr(detail::make_unary(detail::UnOp::Abs, a.node_)); }
Expr pow(const Expr& base, double exponent) { return Expr(detail::make_pow(base.node_, exponent)); }

Expr parse_expression(std::string_view text, const std::vector<std::string>& vocabulary,
                      const std::map<std::string, double>& constants) {
    if (text.empty())
        throw ParseError("empty expression", 0);
    if (vocabulary.empty())
        throw ValidationError("vocabulary must name at least the space variable");
    detail::Parser parser(text, vocabulary, constants);
    return Expr(parser.parse());
}

} // namespace rdr0
