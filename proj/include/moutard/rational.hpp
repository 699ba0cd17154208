#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace moutard {

// Thrown when an exact rational operation would leave int64 range (or divide
// by zero).  Constant folding treats this as "leave the node unfolded".
struct RationalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact rational number over int64 with overflow-checked arithmetic.
// Always normalized: gcd(num, den) == 1, den > 0.
class Rational {
  public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }
    bool is_negative() const { return num_ < 0; }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::string to_text() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(checked_add(checked_mul(a.num_, b.den_),
                                    checked_mul(b.num_, a.den_)),
                        checked_mul(a.den_, b.den_));
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return a + (-b);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw RationalError("rational division by zero");
        return Rational(checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_));
    }
    Rational operator-() const {
        return Rational(checked_neg(num_), den_, already_normal{});
    }

    Rational pow(int e) const {
        if (e < 0) {
            if (num_ == 0) throw RationalError("zero to a negative power");
            Rational inv(den_, num_);
            return inv.pow(-e);
        }
        Rational acc(1);
        Rational base = *this;
        while (e > 0) { // square-and-multiply keeps intermediate growth down
            if (e & 1) acc = acc * base;
            e >>= 1;
            if (e) base = base * base;
        }
        return acc;
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    // Order by exact cross-multiplication in 128-bit to avoid overflow.
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ <
               static_cast<__int128>(b.num_) * a.den_;
    }

  private:
    struct already_normal {};
    Rational(std::int64_t n, std::int64_t d, already_normal) : num_(n), den_(d) {}

    static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw RationalError("rational overflow");
        return r;
    }
    static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw RationalError("rational overflow");
        return r;
    }
    static std::int64_t checked_neg(std::int64_t a) {
        std::int64_t r;
        if (__builtin_sub_overflow(std::int64_t{0}, a, &r))
            throw RationalError("rational overflow");
        return r;
    }

    void normalize() {
        if (den_ == 0) throw RationalError("rational with zero denominator");
        if (den_ < 0) {
            num_ = checked_neg(num_);
            den_ = checked_neg(den_);
        }
        const std::uint64_t g =
            std::gcd(static_cast<std::uint64_t>(num_ < 0 ? -(num_ + 1) + std::uint64_t{1}
                                                         : std::uint64_t(num_)),
                     static_cast<std::uint64_t>(den_));
        if (g > 1) {
            num_ /= static_cast<std::int64_t>(g);
            den_ /= static_cast<std::int64_t>(g);
        }
    }

    std::int64_t num_;
    std::int64_t den_;
};

} // namespace moutard
