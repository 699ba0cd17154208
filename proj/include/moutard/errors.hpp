#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace moutard {

// Syntax error while reading an expression (or a grid / config string).
// `offset` is the byte position in the input, `expected` a short description
// of what would have been accepted there.
struct ParseError : std::runtime_error {
    std::size_t offset;
    std::string expected;
    ParseError(std::size_t off, const std::string& what_arg, const std::string& exp)
        : std::runtime_error(what_arg + " at byte " + std::to_string(off) +
                             (exp.empty() ? "" : " (expected " + exp + ")")),
          offset(off), expected(exp) {}
};

// Run-time evaluation failure.  Distinguishes a true domain violation
// (ln of a non-positive number, division by exact zero, sqrt of a negative)
// from a near-singular point, where a denominator is so small relative to the
// magnitude of the terms that produced it that the value is dominated by
// cancellation noise.  `subexpr` is the text of the offending subexpression.
struct EvalError : std::runtime_error {
    enum class Kind { UnboundParameter, Domain, NearSingular };
    Kind kind;
    std::string subexpr;
    EvalError(Kind k, const std::string& what_arg, const std::string& sub = "")
        : std::runtime_error(what_arg + (sub.empty() ? "" : ": " + sub)),
          kind(k), subexpr(sub) {}
};

// A claimed solution failed its residual check (or a comparison tolerance was
// exceeded).  Mapped to exit code 1 by the command-line tool.
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical machinery failed: quadrature could not reach tolerance, no
// singularity-free path exists, a basepoint is singular, and so on.
// Mapped to exit code 3 by the command-line tool.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureError : NumericalError {
    using NumericalError::NumericalError;
};

struct PathError : NumericalError {
    using NumericalError::NumericalError;
};

} // namespace moutard
