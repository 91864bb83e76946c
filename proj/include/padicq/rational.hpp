#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace padicq {

/// Exact rational in lowest terms with a positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(long value) : value_(value) {}
    Rational(const mpz_class& numerator, const mpz_class& denominator = 1);
    explicit Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

    /// Accepts "a/b" or "a".
    static Rational parse(std::string_view text);

    mpz_class numerator() const { return value_.get_num(); }
    mpz_class denominator() const { return value_.get_den(); }
    const mpq_class& get() const noexcept { return value_; }
    bool is_integer() const { return value_.get_den() == 1; }

    /// "a/b", or "a" when the denominator is 1.
    std::string to_string() const;

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.value_ + b.value_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.value_ - b.value_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.value_ * b.value_)); }
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { return Rational(mpq_class(-value_)); }
    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.value_ != b.value_; }

private:
    mpq_class value_;
};

/// Exponent of p in a nonzero rational.
long valuation(const Rational& value, long prime);

mpz_class binomial(unsigned long n, unsigned long k);

}  // namespace padicq
