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
#ifndef RDR0_ERRORS_HPP
#define RDR0_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdr0 {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input rejected before any numerics ran (bad file, bad expression,
/// violated precondition, failed structural check).
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// A numerical procedure failed to converge or lost a required property.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

/// Syntax error while parsing an expression or model file; carries the
/// offset of the offending character in the input text.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& msg, std::size_t position)
        : ValidationError(msg + " (at position " + std::to_string(position) + ")"),
          position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// An identifier that is neither a function, `pi`, nor in the vocabulary.
class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(const std::string& name, std::size_t position)
        : ParseError("unknown identifier '" + name + "'", position), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

enum class EvalFault {
    DivisionByZero,
    LogNonpositive,
    SqrtNegative,
    PowDomain,
    NonFinite,
};

inline const char* to_string(EvalFault f) {
    switch (f) {
    case EvalFault::DivisionByZero: return "division by zero";
    case EvalFault::LogNonpositive: return "log of a non-positive value";
    case EvalFault::SqrtNegative: return "sqrt of a negative value";
    case EvalFault::PowDomain: return "pow outside its real domain";
    case EvalFault::NonFinite: return "non-finite result";
    }
    return "unknown fault";
}

/// Tagged evaluation failure; expression evaluation never returns a silent NaN.
class EvalDomainError : public Error {
public:
    EvalDomainError(EvalFault fault, const std::string& context)
        : Error(std::string("domain violation: ") + to_string(fault) +
                (context.empty() ? "" : " in " + context)),
          fault_(fault) {}
    EvalFault fault() const { return fault_; }

private:
    EvalFault fault_;
};

} // namespace rdr0

#endif
