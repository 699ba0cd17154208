#include "moutard/simplify.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace moutard {

namespace {

bool is_number(const Expr& e) { return e->kind == NodeKind::Number; }

bool is_one(const Expr& e) { return is_number(e) && e->value.is_one(); }

struct SignedTerm {
    bool negative;
    Expr term;
};

// Flatten an additive tree (Add/Sub/Neg spine) into signed terms.  Children
// are already simplified, so nested chains are left-associated Adds.
void flatten_sum(const Expr& e, bool negative, std::vector<SignedTerm>& out) {
    switch (e->kind) {
    case NodeKind::Add:
        flatten_sum(e->a, negative, out);
        flatten_sum(e->b, negative, out);
        return;
    case NodeKind::Sub:
        flatten_sum(e->a, negative, out);
        flatten_sum(e->b, !negative, out);
        return;
    case NodeKind::Neg:
        flatten_sum(e->a, !negative, out);
        return;
    default:
        out.push_back({negative, e});
    }
}

// Flatten a multiplicative tree into (rational coefficient, factors); Neg
// factors contribute their sign to the coefficient.  Numbers that cannot be
// folded (overflow) stay as explicit factors.
void flatten_product(const Expr& e, Rational& coeff, std::vector<Expr>& factors,
                     bool& folded_any) {
    switch (e->kind) {
    case NodeKind::Mul:
        flatten_product(e->a, coeff, factors, folded_any);
        flatten_product(e->b, coeff, factors, folded_any);
        return;
    case NodeKind::Neg:
        try {
            coeff = -coeff;
        } catch (const RationalError&) {
            factors.push_back(number(-1));
        }
        flatten_product(e->a, coeff, factors, folded_any);
        return;
    case NodeKind::Number:
        try {
            coeff = coeff * e->value;
            folded_any = true;
        } catch (const RationalError&) {
            factors.push_back(e);
        }
        return;
    default:
        factors.push_back(e);
    }
}

// Negate a canonical term without introducing a Neg wrapper when the sign can
// live in a rational coefficient.
Expr negate_term(const Expr& e) {
    if (e->kind == NodeKind::Number) {
        try {
            return number(-e->value);
        } catch (const RationalError&) {
            return neg(e);
        }
    }
    if (e->kind == NodeKind::Mul && e->a->kind == NodeKind::Number) {
        try {
            return mul(number(-e->a->value), e->b);
        } catch (const RationalError&) {
            return neg(e);
        }
    }
    if (e->kind == NodeKind::Neg) return e->a;
    return neg(e);
}

Expr rebuild_sum(std::vector<Expr> terms) {
    if (terms.empty()) return number(0);
    Expr acc = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) acc = add(std::move(acc), terms[i]);
    return acc;
}

Expr simplify_sum(const Expr& e) {
    std::vector<SignedTerm> raw;
    flatten_sum(e, false, raw);

    Rational constant(0);
    bool have_constant = false;
    std::vector<Expr> terms;
    for (auto& st : raw) {
        if (is_number(st.term)) {
            try {
                constant = st.negative ? constant - st.term->value
                                       : constant + st.term->value;
                have_constant = true;
                continue;
            } catch (const RationalError&) {
                // fall through: keep as a term
            }
        }
        terms.push_back(st.negative ? negate_term(st.term) : st.term);
    }
    std::sort(terms.begin(), terms.end(),
              [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });
    if (have_constant && !constant.is_zero())
        terms.insert(terms.begin(), number(constant));
    if (terms.empty()) return number(0);
    if (terms.size() == 1) return terms.front();
    return rebuild_sum(std::move(terms));
}

Expr simplify_product(const Expr& e) {
    Rational coeff(1);
    std::vector<Expr> factors;
    bool folded = false;
    flatten_product(e, coeff, factors, folded);
    (void)folded;

    if (coeff.is_zero()) return number(0);
    std::sort(factors.begin(), factors.end(),
              [](const Expr& a, const Expr& b) { return compare(a, b) < 0; });

    Expr chain;
    for (auto& f : factors) {
        if (is_one(f)) continue;
        chain = chain ? mul(std::move(chain), f) : f;
    }
    if (!chain) return number(coeff);
    if (coeff.is_one()) return chain;
    if (coeff == Rational(-1)) return neg(std::move(chain));
    return mul(number(coeff), std::move(chain));
}

Expr simplify_node(const Expr& e);

Expr simplify_rec(const Expr& e, std::map<const Node*, Expr>& memo) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;

    Expr result;
    if (!e->a) {
        result = e;
    } else {
        Expr a = simplify_rec(e->a, memo);
        Expr b = e->b ? simplify_rec(e->b, memo) : nullptr;
        Expr rebuilt;
        if (a == e->a && b == e->b) {
            rebuilt = e;
        } else {
            Node n;
            n.kind = e->kind;
            n.value = e->value;
            n.var = e->var;
            n.name = e->name;
            n.exponent = e->exponent;
            n.a = std::move(a);
            n.b = std::move(b);
            rebuilt = std::make_shared<const Node>(std::move(n));
        }
        result = simplify_node(rebuilt);
    }
    memo.emplace(e.get(), result);
    return result;
}

// Local rules at a node whose children are already in normal form.
Expr simplify_node(const Expr& e) {
    switch (e->kind) {
    case NodeKind::Neg:
        if (is_number(e->a)) {
            try {
                return number(-e->a->value);
            } catch (const RationalError&) {
                return e;
            }
        }
        if (e->a->kind == NodeKind::Neg) return e->a->a;
        if (e->a->kind == NodeKind::Mul || e->a->kind == NodeKind::Add ||
            e->a->kind == NodeKind::Sub)
            return simplify_sum(e); // absorb the sign into the chain
        return e;

    case NodeKind::Add:
    case NodeKind::Sub:
        return simplify_sum(e);

    case NodeKind::Mul:
        return simplify_product(e);

    case NodeKind::Div:
        if (is_one(e->b)) return e->a;
        if (is_number(e->a) && e->a->value.is_zero() &&
            !(is_number(e->b) && e->b->value.is_zero()))
            return number(0);
        if (is_number(e->a) && is_number(e->b) && !e->b->value.is_zero()) {
            try {
                return number(e->a->value / e->b->value);
            } catch (const RationalError&) {
                return e;
            }
        }
        return e;

    case NodeKind::Pow:
        if (e->exponent == 0) return number(1);
        if (e->exponent == 1) return e->a;
        if (is_number(e->a)) {
            try {
                return number(e->a->value.pow(e->exponent));
            } catch (const RationalError&) {
                return e;
            }
        }
        return e;

    default:
        return e;
    }
}

} // namespace

Expr simplify(const Expr& e) {
    std::map<const Node*, Expr> memo;
    return simplify_rec(e, memo);
}

} // namespace moutard
