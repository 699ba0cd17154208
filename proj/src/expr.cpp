#include "moutard/expr.hpp"

#include <cassert>
#include <map>
#include <sstream>
#include <utility>

namespace moutard {

namespace {

Expr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Expr make_unary(NodeKind k, Expr a) {
    Node n;
    n.kind = k;
    n.a = std::move(a);
    return make(std::move(n));
}

Expr make_binary(NodeKind k, Expr a, Expr b) {
    Node n;
    n.kind = k;
    n.a = std::move(a);
    n.b = std::move(b);
    return make(std::move(n));
}

} // namespace

Expr number(Rational v) {
    Node n;
    n.kind = NodeKind::Number;
    n.value = v;
    return make(std::move(n));
}

Expr number(std::int64_t v) { return number(Rational(v)); }

Expr constant_pi() {
    Node n;
    n.kind = NodeKind::Pi;
    return make(std::move(n));
}

Expr variable(char v) {
    assert(v == 'r' || v == 'z');
    Node n;
    n.kind = NodeKind::Var;
    n.var = v;
    return make(std::move(n));
}

Expr var_r() {
    static const Expr r = variable('r');
    return r;
}

Expr var_z() {
    static const Expr z = variable('z');
    return z;
}

Expr parameter(std::string name) {
    Node n;
    n.kind = NodeKind::Param;
    n.name = std::move(name);
    return make(std::move(n));
}

Expr neg(Expr e) { return make_unary(NodeKind::Neg, std::move(e)); }
Expr sin_(Expr e) { return make_unary(NodeKind::Sin, std::move(e)); }
Expr cos_(Expr e) { return make_unary(NodeKind::Cos, std::move(e)); }
Expr tan_(Expr e) { return make_unary(NodeKind::Tan, std::move(e)); }
Expr cot_(Expr e) { return make_unary(NodeKind::Cot, std::move(e)); }
Expr exp_(Expr e) { return make_unary(NodeKind::Exp, std::move(e)); }
Expr ln_(Expr e) { return make_unary(NodeKind::Ln, std::move(e)); }
Expr sqrt_(Expr e) { return make_unary(NodeKind::Sqrt, std::move(e)); }

Expr add(Expr a, Expr b) { return make_binary(NodeKind::Add, std::move(a), std::move(b)); }
Expr sub(Expr a, Expr b) { return make_binary(NodeKind::Sub, std::move(a), std::move(b)); }
Expr mul(Expr a, Expr b) { return make_binary(NodeKind::Mul, std::move(a), std::move(b)); }
Expr div(Expr a, Expr b) { return make_binary(NodeKind::Div, std::move(a), std::move(b)); }

Expr pow_i(Expr base, int exponent) {
    Node n;
    n.kind = NodeKind::Pow;
    n.a = std::move(base);
    n.exponent = exponent;
    return make(std::move(n));
}

bool is_unary(NodeKind k) {
    switch (k) {
    case NodeKind::Neg:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Tan:
    case NodeKind::Cot:
    case NodeKind::Exp:
    case NodeKind::Ln:
    case NodeKind::Sqrt:
        return true;
    default:
        return false;
    }
}

bool is_binary(NodeKind k) {
    switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div:
        return true;
    default:
        return false;
    }
}

int compare(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
    switch (a->kind) {
    case NodeKind::Number:
        if (a->value == b->value) return 0;
        return a->value < b->value ? -1 : 1;
    case NodeKind::Pi:
        return 0;
    case NodeKind::Var:
        if (a->var == b->var) return 0;
        return a->var < b->var ? -1 : 1;
    case NodeKind::Param:
        return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
    case NodeKind::Pow: {
        int c = compare(a->a, b->a);
        if (c != 0) return c;
        if (a->exponent == b->exponent) return 0;
        return a->exponent < b->exponent ? -1 : 1;
    }
    default:
        if (is_unary(a->kind)) return compare(a->a, b->a);
        int c = compare(a->a, b->a);
        if (c != 0) return c;
        return compare(a->b, b->b);
    }
}

namespace {

void collect_symbols(const Expr& e, std::set<std::string>& out) {
    switch (e->kind) {
    case NodeKind::Var:
        out.insert(std::string(1, e->var));
        return;
    case NodeKind::Param:
        out.insert(e->name);
        return;
    default:
        if (e->a) collect_symbols(e->a, out);
        if (e->b) collect_symbols(e->b, out);
    }
}

// Generic node-wise rebuild with per-call memoization over the shared DAG.
template <class Leaf>
Expr rewrite(const Expr& e, std::map<const Node*, Expr>& memo, Leaf&& leaf) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    Expr result;
    if (Expr r = leaf(e)) {
        result = r;
    } else if (e->a) {
        Expr a = rewrite(e->a, memo, leaf);
        Expr b = e->b ? rewrite(e->b, memo, leaf) : nullptr;
        if (a == e->a && b == e->b) {
            result = e;
        } else {
            Node n;
            n.kind = e->kind;
            n.value = e->value;
            n.var = e->var;
            n.name = e->name;
            n.exponent = e->exponent;
            n.a = std::move(a);
            n.b = std::move(b);
            result = make(std::move(n));
        }
    } else {
        result = e;
    }
    memo.emplace(e.get(), result);
    return result;
}

} // namespace

std::set<std::string> free_symbols(const Expr& e) {
    std::set<std::string> out;
    collect_symbols(e, out);
    return out;
}

Expr substitute_param(const Expr& e, const std::string& name, const Expr& replacement) {
    std::map<const Node*, Expr> memo;
    return rewrite(e, memo, [&](const Expr& n) -> Expr {
        if (n->kind == NodeKind::Param && n->name == name) return replacement;
        return nullptr;
    });
}

Expr substitute_var(const Expr& e, char v, const Expr& replacement) {
    std::map<const Node*, Expr> memo;
    return rewrite(e, memo, [&](const Expr& n) -> Expr {
        if (n->kind == NodeKind::Var && n->var == v) return replacement;
        return nullptr;
    });
}

// --- printing -------------------------------------------------------------

namespace {

// Precedence levels: additive 1, multiplicative 2, prefix minus 3, power 4,
// atoms 5.  A child is parenthesized when its level is too low for the slot.
int precedence(const Node& n) {
    switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub:
        return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
        return 2;
    case NodeKind::Neg:
        return 3;
    case NodeKind::Pow:
        return 4;
    case NodeKind::Number:
        // Non-integer rationals print as "p/q" and negative integers as "-p";
        // give them the precedence of the operator their text contains.
        if (!n.value.is_integer()) return 2;
        if (n.value.is_negative()) return 3;
        return 5;
    default:
        return 5;
    }
}

const char* function_name(NodeKind k) {
    switch (k) {
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    case NodeKind::Tan: return "tan";
    case NodeKind::Cot: return "cot";
    case NodeKind::Exp: return "exp";
    case NodeKind::Ln: return "ln";
    case NodeKind::Sqrt: return "sqrt";
    default: return "";
    }
}

void print_node(std::ostream& os, const Expr& e, int min_level) {
    const bool parens = precedence(*e) < min_level;
    if (parens) os << '(';
    switch (e->kind) {
    case NodeKind::Number:
        os << e->value.to_text();
        break;
    case NodeKind::Pi:
        os << "pi";
        break;
    case NodeKind::Var:
        os << e->var;
        break;
    case NodeKind::Param:
        os << e->name;
        break;
    case NodeKind::Neg:
        os << '-';
        print_node(os, e->a, 3);
        break;
    case NodeKind::Add:
        print_node(os, e->a, 1);
        // Render x + (-y) as x - y; simplify() produces such terms.
        if (e->b->kind == NodeKind::Neg) {
            os << " - ";
            print_node(os, e->b->a, 2);
        } else if (e->b->kind == NodeKind::Number && e->b->value.is_negative()) {
            os << " - ";
            os << (-e->b->value).to_text();
        } else {
            os << " + ";
            print_node(os, e->b, 2);
        }
        break;
    case NodeKind::Sub:
        print_node(os, e->a, 1);
        os << " - ";
        print_node(os, e->b, 2);
        break;
    case NodeKind::Mul:
        print_node(os, e->a, 2);
        os << "*";
        print_node(os, e->b, 3);
        break;
    case NodeKind::Div:
        print_node(os, e->a, 2);
        os << "/";
        print_node(os, e->b, 3);
        break;
    case NodeKind::Pow:
        print_node(os, e->a, 5);
        os << "^";
        if (e->exponent < 0)
            os << "(" << e->exponent << ")";
        else
            os << e->exponent;
        break;
    default:
        os << function_name(e->kind) << "(";
        print_node(os, e->a, 0);
        os << ")";
        break;
    }
    if (parens) os << ')';
}

} // namespace

std::string to_text(const Expr& e) {
    std::ostringstream os;
    print_node(os, e, 0);
    return os.str();
}

} // namespace moutard
