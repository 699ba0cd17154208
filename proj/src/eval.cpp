#include "moutard/eval.hpp"

#include <cmath>

namespace moutard {

namespace {

struct Ctx {
    double r, z;
    const ParameterSet* params;
    double threshold;
};

[[noreturn]] void fail_domain(const Expr& e, const std::string& what) {
    throw EvalError(EvalError::Kind::Domain, what, to_text(e));
}

[[noreturn]] void fail_singular(const Expr& e, const std::string& what) {
    throw EvalError(EvalError::Kind::NearSingular, what, to_text(e));
}

Magnitude check_finite(const Expr& e, Magnitude m) {
    if (!std::isfinite(m.value)) fail_domain(e, "non-finite value");
    return m;
}

// First-order error propagation for a function application: the result can be
// wrong by about |f'| times the argument's accumulated magnitude, so near
// zeros of f that bound is what the cancellation test must see.
Magnitude via(double f, double fprime, const Magnitude& u) {
    return {f, std::max(std::abs(f), std::abs(fprime) * u.magnitude)};
}

Magnitude eval(const Expr& e, const Ctx& c) {
    switch (e->kind) {
    case NodeKind::Number: {
        const double v = e->value.to_double();
        return {v, std::abs(v)};
    }
    case NodeKind::Pi:
        return {M_PI, M_PI};
    case NodeKind::Var: {
        const double v = e->var == 'r' ? c.r : c.z;
        return {v, std::abs(v)};
    }
    case NodeKind::Param: {
        auto it = c.params->find(e->name);
        if (it == c.params->end())
            throw EvalError(EvalError::Kind::UnboundParameter, "unbound parameter",
                            e->name);
        return {it->second, std::abs(it->second)};
    }
    case NodeKind::Neg: {
        Magnitude a = eval(e->a, c);
        return {-a.value, a.magnitude};
    }
    case NodeKind::Add: {
        Magnitude a = eval(e->a, c);
        Magnitude b = eval(e->b, c);
        return check_finite(e, {a.value + b.value, a.magnitude + b.magnitude});
    }
    case NodeKind::Sub: {
        Magnitude a = eval(e->a, c);
        Magnitude b = eval(e->b, c);
        return check_finite(e, {a.value - b.value, a.magnitude + b.magnitude});
    }
    case NodeKind::Mul: {
        Magnitude a = eval(e->a, c);
        Magnitude b = eval(e->b, c);
        return check_finite(e, {a.value * b.value, a.magnitude * b.magnitude});
    }
    case NodeKind::Div: {
        Magnitude a = eval(e->a, c);
        Magnitude b = eval(e->b, c);
        if (b.value == 0.0) fail_domain(e->b, "division by zero");
        if (std::abs(b.value) < c.threshold * b.magnitude)
            fail_singular(e->b, "denominator lost to cancellation");
        return check_finite(
            e, {a.value / b.value, a.magnitude / std::abs(b.value)});
    }
    case NodeKind::Pow: {
        Magnitude u = eval(e->a, c);
        const int n = e->exponent;
        if (n == 0) return {1.0, 1.0};
        if (n < 0) {
            if (u.value == 0.0) fail_domain(e->a, "zero raised to a negative power");
            if (std::abs(u.value) < c.threshold * u.magnitude)
                fail_singular(e->a, "denominator lost to cancellation");
            return check_finite(e, {std::pow(u.value, n),
                                    std::pow(std::abs(u.value), n)});
        }
        return check_finite(e, {std::pow(u.value, n), std::pow(u.magnitude, n)});
    }
    case NodeKind::Sin: {
        Magnitude u = eval(e->a, c);
        return check_finite(e, via(std::sin(u.value), std::cos(u.value), u));
    }
    case NodeKind::Cos: {
        Magnitude u = eval(e->a, c);
        return check_finite(e, via(std::cos(u.value), -std::sin(u.value), u));
    }
    case NodeKind::Tan: {
        Magnitude u = eval(e->a, c);
        const double cs = std::cos(u.value);
        if (std::abs(cs) < c.threshold * std::max(1.0, u.magnitude))
            fail_singular(e, "tan evaluated near a pole");
        const double t = std::tan(u.value);
        return check_finite(e, via(t, 1.0 + t * t, u));
    }
    case NodeKind::Cot: {
        Magnitude u = eval(e->a, c);
        const double sn = std::sin(u.value);
        if (std::abs(sn) < c.threshold * std::max(1.0, u.magnitude))
            fail_singular(e, "cot evaluated near a pole");
        const double ct = std::cos(u.value) / sn;
        return check_finite(e, via(ct, -(1.0 + ct * ct), u));
    }
    case NodeKind::Exp: {
        Magnitude u = eval(e->a, c);
        const double v = std::exp(u.value);
        return check_finite(e, via(v, v, u));
    }
    case NodeKind::Ln: {
        Magnitude u = eval(e->a, c);
        if (u.value <= 0.0) fail_domain(e->a, "ln of a non-positive value");
        return check_finite(e, via(std::log(u.value), 1.0 / u.value, u));
    }
    case NodeKind::Sqrt: {
        Magnitude u = eval(e->a, c);
        if (u.value < 0.0) fail_domain(e->a, "sqrt of a negative value");
        const double s = std::sqrt(u.value);
        if (s == 0.0) return {0.0, u.magnitude}; // derivative unbounded; keep raw scale
        return check_finite(e, via(s, 0.5 / s, u));
    }
    }
    fail_domain(e, "malformed expression node");
}

} // namespace

double evaluate(const Expr& e, double r, double z, const ParameterSet& params,
                double singular_threshold) {
    Ctx c{r, z, &params, singular_threshold};
    return eval(e, c).value;
}

Magnitude evaluate_with_magnitude(const Expr& e, double r, double z,
                                  const ParameterSet& params,
                                  double singular_threshold) {
    Ctx c{r, z, &params, singular_threshold};
    return eval(e, c);
}

PointStatus classify_point(const Expr& e, double r, double z,
                           const ParameterSet& params, double singular_threshold) {
    try {
        evaluate(e, r, z, params, singular_threshold);
        return {PointClass::Regular, ""};
    } catch (const EvalError& err) {
        if (err.kind == EvalError::Kind::UnboundParameter) throw;
        return {err.kind == EvalError::Kind::NearSingular ? PointClass::NearSingular
                                                          : PointClass::DomainError,
                err.what()};
    }
}

} // namespace moutard
