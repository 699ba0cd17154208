#include "moutard/hyperdual.hpp"

#include <cmath>

namespace moutard {

namespace {

HyperDual constant(double v) { return {v, 0, 0, 0, 0, 0}; }

HyperDual operator-(const HyperDual& a) {
    return {-a.v, -a.dr, -a.dz, -a.drr, -a.drz, -a.dzz};
}

HyperDual operator+(const HyperDual& a, const HyperDual& b) {
    return {a.v + b.v,     a.dr + b.dr,   a.dz + b.dz,
            a.drr + b.drr, a.drz + b.drz, a.dzz + b.dzz};
}

HyperDual operator-(const HyperDual& a, const HyperDual& b) { return a + (-b); }

HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    HyperDual o;
    o.v = a.v * b.v;
    o.dr = a.dr * b.v + a.v * b.dr;
    o.dz = a.dz * b.v + a.v * b.dz;
    o.drr = a.drr * b.v + 2.0 * a.dr * b.dr + a.v * b.drr;
    o.drz = a.drz * b.v + a.dr * b.dz + a.dz * b.dr + a.v * b.drz;
    o.dzz = a.dzz * b.v + 2.0 * a.dz * b.dz + a.v * b.dzz;
    return o;
}

// f(u) with given first and second derivative at u.v.
HyperDual chain(const HyperDual& u, double f, double fp, double fpp) {
    HyperDual o;
    o.v = f;
    o.dr = fp * u.dr;
    o.dz = fp * u.dz;
    o.drr = fpp * u.dr * u.dr + fp * u.drr;
    o.drz = fpp * u.dr * u.dz + fp * u.drz;
    o.dzz = fpp * u.dz * u.dz + fp * u.dzz;
    return o;
}

HyperDual recip(const Expr& site, const HyperDual& u) {
    if (u.v == 0.0)
        throw EvalError(EvalError::Kind::Domain, "division by zero", to_text(site));
    const double iv = 1.0 / u.v;
    return chain(u, iv, -iv * iv, 2.0 * iv * iv * iv);
}

HyperDual int_pow(const Expr& site, const HyperDual& u, int n) {
    if (n == 0) return constant(1.0);
    if (n < 0) return recip(site, int_pow(site, u, -n));
    const double f = std::pow(u.v, n);
    const double fp = n * std::pow(u.v, n - 1);
    const double fpp = (n - 1) == 0 ? 0.0 : double(n) * (n - 1) * std::pow(u.v, n - 2);
    return chain(u, f, fp, fpp);
}

HyperDual eval(const Expr& e, double r, double z, const ParameterSet& params) {
    switch (e->kind) {
    case NodeKind::Number:
        return constant(e->value.to_double());
    case NodeKind::Pi:
        return constant(M_PI);
    case NodeKind::Var:
        if (e->var == 'r') return {r, 1, 0, 0, 0, 0};
        return {z, 0, 1, 0, 0, 0};
    case NodeKind::Param: {
        auto it = params.find(e->name);
        if (it == params.end())
            throw EvalError(EvalError::Kind::UnboundParameter, "unbound parameter",
                            e->name);
        return constant(it->second);
    }
    case NodeKind::Neg:
        return -eval(e->a, r, z, params);
    case NodeKind::Add:
        return eval(e->a, r, z, params) + eval(e->b, r, z, params);
    case NodeKind::Sub:
        return eval(e->a, r, z, params) - eval(e->b, r, z, params);
    case NodeKind::Mul:
        return eval(e->a, r, z, params) * eval(e->b, r, z, params);
    case NodeKind::Div:
        return eval(e->a, r, z, params) * recip(e->b, eval(e->b, r, z, params));
    case NodeKind::Pow:
        return int_pow(e->a, eval(e->a, r, z, params), e->exponent);
    case NodeKind::Sin: {
        HyperDual u = eval(e->a, r, z, params);
        const double s = std::sin(u.v), cs = std::cos(u.v);
        return chain(u, s, cs, -s);
    }
    case NodeKind::Cos: {
        HyperDual u = eval(e->a, r, z, params);
        const double s = std::sin(u.v), cs = std::cos(u.v);
        return chain(u, cs, -s, -cs);
    }
    case NodeKind::Tan: {
        HyperDual u = eval(e->a, r, z, params);
        if (std::cos(u.v) == 0.0)
            throw EvalError(EvalError::Kind::Domain, "tan at a pole", to_text(e));
        const double t = std::tan(u.v);
        const double sec2 = 1.0 + t * t;
        return chain(u, t, sec2, 2.0 * t * sec2);
    }
    case NodeKind::Cot: {
        HyperDual u = eval(e->a, r, z, params);
        const double sn = std::sin(u.v);
        if (sn == 0.0)
            throw EvalError(EvalError::Kind::Domain, "cot at a pole", to_text(e));
        const double ct = std::cos(u.v) / sn;
        const double csc2 = 1.0 + ct * ct;
        return chain(u, ct, -csc2, 2.0 * ct * csc2);
    }
    case NodeKind::Exp: {
        HyperDual u = eval(e->a, r, z, params);
        const double v = std::exp(u.v);
        return chain(u, v, v, v);
    }
    case NodeKind::Ln: {
        HyperDual u = eval(e->a, r, z, params);
        if (u.v <= 0.0)
            throw EvalError(EvalError::Kind::Domain, "ln of a non-positive value",
                            to_text(e->a));
        const double iv = 1.0 / u.v;
        return chain(u, std::log(u.v), iv, -iv * iv);
    }
    case NodeKind::Sqrt: {
        HyperDual u = eval(e->a, r, z, params);
        if (u.v < 0.0)
            throw EvalError(EvalError::Kind::Domain, "sqrt of a negative value",
                            to_text(e->a));
        if (u.v == 0.0)
            throw EvalError(EvalError::Kind::Domain,
                            "sqrt at zero has unbounded derivative", to_text(e->a));
        const double s = std::sqrt(u.v);
        const double fp = 0.5 / s;
        return chain(u, s, fp, -0.25 / (u.v * s));
    }
    }
    throw EvalError(EvalError::Kind::Domain, "malformed expression node", to_text(e));
}

bool all_finite(const HyperDual& h) {
    return std::isfinite(h.v) && std::isfinite(h.dr) && std::isfinite(h.dz) &&
           std::isfinite(h.drr) && std::isfinite(h.drz) && std::isfinite(h.dzz);
}

} // namespace

HyperDual evaluate_hyperdual(const Expr& e, double r, double z,
                             const ParameterSet& params) {
    HyperDual h = eval(e, r, z, params);
    if (!all_finite(h))
        throw EvalError(EvalError::Kind::Domain, "non-finite value or derivative",
                        to_text(e));
    return h;
}

} // namespace moutard
