#include "moutard/derivative.hpp"

#include <cassert>
#include <map>

#include "moutard/simplify.hpp"

namespace moutard {

namespace {

Expr d(const Expr& e, char var, std::map<const Node*, Expr>& memo) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;

    Expr r;
    switch (e->kind) {
    case NodeKind::Number:
    case NodeKind::Pi:
    case NodeKind::Param:
        r = number(0);
        break;
    case NodeKind::Var:
        r = number(e->var == var ? 1 : 0);
        break;
    case NodeKind::Neg:
        r = -d(e->a, var, memo);
        break;
    case NodeKind::Add:
        r = d(e->a, var, memo) + d(e->b, var, memo);
        break;
    case NodeKind::Sub:
        r = d(e->a, var, memo) - d(e->b, var, memo);
        break;
    case NodeKind::Mul:
        r = d(e->a, var, memo) * e->b + e->a * d(e->b, var, memo);
        break;
    case NodeKind::Div:
        r = (d(e->a, var, memo) * e->b - e->a * d(e->b, var, memo)) / sq(e->b);
        break;
    case NodeKind::Pow:
        r = number(e->exponent) * pow_i(e->a, e->exponent - 1) * d(e->a, var, memo);
        break;
    case NodeKind::Sin:
        r = cos_(e->a) * d(e->a, var, memo);
        break;
    case NodeKind::Cos:
        r = -(sin_(e->a) * d(e->a, var, memo));
        break;
    case NodeKind::Tan:
        r = d(e->a, var, memo) / sq(cos_(e->a));
        break;
    case NodeKind::Cot:
        r = -(d(e->a, var, memo) / sq(sin_(e->a)));
        break;
    case NodeKind::Exp:
        r = exp_(e->a) * d(e->a, var, memo);
        break;
    case NodeKind::Ln:
        r = d(e->a, var, memo) / e->a;
        break;
    case NodeKind::Sqrt:
        r = d(e->a, var, memo) / (number(2) * sqrt_(e->a));
        break;
    }
    memo.emplace(e.get(), r);
    return r;
}

} // namespace

Expr differentiate(const Expr& e, char var) {
    assert(var == 'r' || var == 'z');
    std::map<const Node*, Expr> memo;
    return simplify(d(e, var, memo));
}

} // namespace moutard
