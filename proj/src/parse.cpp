#include "moutard/parse.hpp"

#include <cctype>
#include <cstdint>

namespace moutard {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

class Parser {
  public:
    explicit Parser(const std::string& text) : text_(text) {}

    Expr run() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input", "end of input or an operator");
        return e;
    }

  private:
    [[noreturn]] void fail(const std::string& msg, const std::string& expected) {
        throw ParseError(pos_, msg, expected);
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_expr() {
        Expr e = parse_term();
        for (;;) {
            if (eat('+'))
                e = add(std::move(e), parse_term());
            else if (eat('-'))
                e = sub(std::move(e), parse_term());
            else
                return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            if (eat('*')) {
                e = mul(std::move(e), parse_factor());
            } else if (eat('/')) {
                Expr d = parse_factor();
                e = fold_literal_quotient(std::move(e), std::move(d));
            } else {
                return e;
            }
        }
    }

    // A quotient of two literal numbers is an exact rational constant, not a
    // Div node; this keeps print/parse round-trips of rationals structural.
    static Expr fold_literal_quotient(Expr a, Expr b) {
        if (a->kind == NodeKind::Number && b->kind == NodeKind::Number &&
            !b->value.is_zero()) {
            try {
                return number(a->value / b->value);
            } catch (const RationalError&) {
                // overflow: keep the explicit quotient
            }
        }
        return div(std::move(a), std::move(b));
    }

    Expr parse_factor() {
        if (eat('-')) return neg(parse_factor());
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (!eat('^')) return base;
        return pow_i(std::move(base), parse_exponent());
    }

    int parse_exponent() {
        const bool parens = eat('(');
        bool negate = false;
        if (eat('-')) negate = true;
        skip_ws();
        std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("exponent must be an integer literal", "an integer (use sqrt for roots)");
        std::int64_t v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + (text_[pos_] - '0');
            if (v > 1000000) {
                pos_ = start;
                fail("exponent out of range", "a small integer");
            }
            ++pos_;
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            pos_ = start;
            fail("non-integer exponent", "an integer (use sqrt for roots)");
        }
        if (parens && !eat(')')) fail("unclosed exponent parenthesis", "')'");
        return static_cast<int>(negate ? -v : v);
    }

    Expr parse_atom() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!eat(')')) fail("unclosed parenthesis", "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (is_ident_start(c)) return parse_identifier();
        fail("unexpected input", "a number, identifier, function call, '(' or '-'");
    }

    Expr parse_number() {
        skip_ws();
        const std::size_t start = pos_;
        std::int64_t mantissa = 0;
        std::int64_t scale = 1;
        bool any_digits = false;
        bool seen_dot = false;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isdigit(static_cast<unsigned char>(c))) {
                if (__builtin_mul_overflow(mantissa, std::int64_t{10}, &mantissa) ||
                    __builtin_add_overflow(mantissa, std::int64_t{c - '0'}, &mantissa)) {
                    pos_ = start;
                    fail("numeric literal too large", "at most 18 digits");
                }
                if (seen_dot && __builtin_mul_overflow(scale, std::int64_t{10}, &scale)) {
                    pos_ = start;
                    fail("numeric literal too large", "fewer fractional digits");
                }
                any_digits = true;
            } else if (c == '.' && !seen_dot) {
                seen_dot = true;
            } else {
                break;
            }
            ++pos_;
        }
        if (!any_digits) fail("malformed number", "digits");
        return number(Rational(mantissa, scale));
    }

    Expr parse_identifier() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        const std::string name = text_.substr(start, pos_ - start);

        if (name == "pi") return constant_pi();
        if (name == "r") return var_r();
        if (name == "z") return var_z();

        static const struct {
            const char* name;
            Expr (*build)(Expr);
        } functions[] = {
            {"sin", sin_}, {"cos", cos_},   {"tan", tan_}, {"cot", cot_},
            {"exp", exp_}, {"ln", ln_},     {"sqrt", sqrt_},
        };
        for (const auto& f : functions) {
            if (name == f.name) {
                if (!eat('(')) fail("function requires an argument list", "'('");
                Expr arg = parse_expr();
                if (!eat(')')) fail("unclosed function argument", "')'");
                return f.build(std::move(arg));
            }
        }
        // Any other identifier followed by '(' is a call to something we
        // don't know; bare identifiers are parameters.
        if (peek() == '(') {
            pos_ = start;
            fail("unknown function name '" + name + "'",
                 "one of sin, cos, tan, cot, exp, ln, sqrt");
        }
        return parameter(name);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse(const std::string& text) { return Parser(text).run(); }

} // namespace moutard
