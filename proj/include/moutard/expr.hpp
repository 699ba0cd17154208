#pragma once

#include <memory>
#include <set>
#include <string>

#include "moutard/rational.hpp"

namespace moutard {

enum class NodeKind {
    Number, // exact rational constant
    Pi,     // the named constant pi
    Var,    // r or z
    Param,  // named parameter (k, C1, z0, ...)
    Neg,
    Sin,
    Cos,
    Tan,
    Cot,
    Exp,
    Ln,
    Sqrt,
    Add,
    Sub,
    Mul,
    Div,
    Pow, // integer exponent only
};

struct Node;
using Expr = std::shared_ptr<const Node>;

// Immutable AST node.  Exprs are freely shareable across threads; all
// operations on them are pure.
struct Node {
    NodeKind kind;
    Rational value;   // Number
    char var = 0;     // Var: 'r' or 'z'
    std::string name; // Param
    Expr a, b;        // operands (unary ops use a only)
    int exponent = 0; // Pow
};

// --- constructors ---------------------------------------------------------

Expr number(Rational v);
Expr number(std::int64_t n);
Expr constant_pi();
Expr var_r();
Expr var_z();
Expr variable(char v); // 'r' or 'z'
Expr parameter(std::string name);

Expr neg(Expr e);
Expr sin_(Expr e);
Expr cos_(Expr e);
Expr tan_(Expr e);
Expr cot_(Expr e);
Expr exp_(Expr e);
Expr ln_(Expr e);
Expr sqrt_(Expr e);

Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr div(Expr a, Expr b);
Expr pow_i(Expr base, int exponent);
inline Expr sq(Expr e) { return pow_i(std::move(e), 2); }

// Operator sugar so derivative rules read like the calculus they implement.
inline Expr operator+(Expr a, Expr b) { return add(std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return sub(std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return mul(std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return div(std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return neg(std::move(a)); }

// --- structure ------------------------------------------------------------

bool is_unary(NodeKind k);
bool is_binary(NodeKind k);

// Total structural order; 0 iff structurally identical.
int compare(const Expr& a, const Expr& b);
inline bool structurally_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

// Variables and parameters occurring in e ("r", "z", parameter names).
// pi is a constant, not a symbol, and is not reported.
std::set<std::string> free_symbols(const Expr& e);

// Replace every occurrence of parameter `name` by `replacement`.
Expr substitute_param(const Expr& e, const std::string& name, const Expr& replacement);
// Replace every occurrence of variable `v` ('r' or 'z') by `replacement`.
Expr substitute_var(const Expr& e, char v, const Expr& replacement);

// Render with minimal parentheses; parse(to_text(e)) recovers e up to the
// simplify() normal form (see simplify.hpp).
std::string to_text(const Expr& e);

} // namespace moutard
