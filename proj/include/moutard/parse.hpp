#pragma once

#include <string>

#include "moutard/errors.hpp"
#include "moutard/expr.hpp"

namespace moutard {

// Recursive-descent parser for the expression grammar:
//
//   expr     := term (('+'|'-') term)*
//   term     := factor (('*'|'/') factor)*
//   factor   := '-' factor | power
//   power    := atom ('^' exponent)?
//   atom     := number | 'pi' | 'r' | 'z' | ident | func '(' expr ')' | '(' expr ')'
//   exponent := ['-']? integer | '(' ['-']? integer ')'
//
// Functions: sin cos tan cot exp ln sqrt.  Identifiers other than r, z, pi
// and function names are parameters.  Number literals are decimal or rational
// and are stored exactly (0.25 becomes 1/4; a literal quotient of literals
// such as 3/2 is folded to the exact rational at parse time).
// Exponents must be integer literals; write sqrt(x) rather than x^(1/2).
//
// Throws ParseError with the byte offset of the failure.
Expr parse(const std::string& text);

} // namespace moutard
