#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "padicq/errors.hpp"

namespace padicq {

class Rational;

/// The ambient odd prime p together with the working precision N.
///
/// N bounds the relative precision (number of significant base-p digits) of
/// every number created in the context. Contexts are cheap to copy; the power
/// table p^0..p^K is shared and immutable.
class PadicContext {
public:
    /// Throws EvenPrime for p = 2, NonPrime for composites and BadPrecision for N < 1.
    static PadicContext create(long prime, int precision);

    long prime() const noexcept;
    int precision() const noexcept;
    const mpz_class& prime_z() const noexcept;

    /// p^k for 0 <= k; served from the shared table when possible.
    mpz_class power(long k) const;
    const mpz_class& modulus() const noexcept;

    PadicContext with_precision(int precision) const;

    friend bool operator==(const PadicContext& a, const PadicContext& b) noexcept {
        return a.prime() == b.prime() && a.precision() == b.precision();
    }
    friend bool operator!=(const PadicContext& a, const PadicContext& b) noexcept { return !(a == b); }

private:
    struct State;
    explicit PadicContext(std::shared_ptr<const State> state) : state_(std::move(state)) {}
    const mpz_class& cached_power(long k) const;
    std::shared_ptr<const State> state_;

    friend class PadicNumber;
};

/// An element of Q_p known to finitely many digits.
///
/// Nonzero values are p^v * u + O(p^(v+k)) with u a unit mantissa reduced
/// mod p^k. ZERO is a separate state that only records a bound O(p^M).
class PadicNumber {
public:
    static PadicNumber from_rational(const mpz_class& numerator, const mpz_class& denominator,
                                     const PadicContext& ctx);
    static PadicNumber from_rational(const Rational& value, const PadicContext& ctx);
    static PadicNumber from_integer(const mpz_class& value, const PadicContext& ctx);
    static PadicNumber from_integer(long value, const PadicContext& ctx) {
        return from_integer(mpz_class(value), ctx);
    }
    static PadicNumber zero(const PadicContext& ctx, long bound);
    static PadicNumber zero(const PadicContext& ctx) { return zero(ctx, ctx.precision()); }
    static PadicNumber one(const PadicContext& ctx) { return from_integer(1L, ctx); }

    /// p^shift * residue + O(p^(shift + digits)).
    static PadicNumber from_residue(const mpz_class& residue, long digits, long shift,
                                    const PadicContext& ctx);

    /// Little-endian digits d0 != 0 (shorter lists are zero-padded up to `relative_precision`).
    static PadicNumber from_digits(long valuation, const std::vector<long>& digits,
                                   long relative_precision, const PadicContext& ctx);

    const PadicContext& context() const noexcept { return ctx_; }
    long prime() const noexcept { return ctx_.prime(); }

    bool is_zero() const noexcept { return zero_; }
    /// Throws ZeroHasNoValuation on ZERO.
    long valuation() const;
    PadicNumber unit_part() const;
    long relative_precision() const noexcept { return zero_ ? 0 : rel_prec_; }
    /// v + k, or the bound M for ZERO.
    long absolute_precision() const noexcept { return zero_ ? val_ : val_ + rel_prec_; }
    const mpz_class& mantissa() const noexcept { return unit_; }
    std::vector<long> digits() const;

    /// Forget every digit at or beyond p^cap.
    PadicNumber with_absolute_precision(long cap) const;
    /// Same value in another context with the same prime (relative precision re-capped).
    PadicNumber rebased(const PadicContext& ctx) const;

    /// The value mod p^digits as an integer in [0, p^digits); requires valuation >= 0
    /// (ZERO counts) and absolute precision >= digits.
    mpz_class residue(long digits) const;

    /// Integer power; negative exponents invert.
    PadicNumber pow(const mpz_class& exponent) const;
    PadicNumber pow(long exponent) const { return pow(mpz_class(exponent)); }

    PadicNumber operator-() const;
    friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b);
    friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b);
    PadicNumber& operator+=(const PadicNumber& b) { return *this = *this + b; }
    PadicNumber& operator-=(const PadicNumber& b) { return *this = *this - b; }
    PadicNumber& operator*=(const PadicNumber& b) { return *this = *this * b; }
    PadicNumber& operator/=(const PadicNumber& b) { return *this = *this / b; }

    /// Representation equality: same state, valuation, precision and mantissa.
    friend bool operator==(const PadicNumber& a, const PadicNumber& b);
    friend bool operator!=(const PadicNumber& a, const PadicNumber& b) { return !(a == b); }

private:
    PadicNumber(PadicContext ctx) : ctx_(std::move(ctx)) {}
    static PadicNumber normalized(const PadicContext& ctx, long valuation, mpz_class value, long digits);

    PadicContext ctx_;
    bool zero_ = true;
    long val_ = 0;  // valuation, or the bound M when zero_
    long rel_prec_ = 0;
    mpz_class unit_;
};

enum class ArithOp { add, sub, mul, div };

PadicNumber arith(const PadicNumber& a, const PadicNumber& b, ArithOp op);

/// v_p(a - b); when the difference is ZERO this is the bound it carries.
long agreement(const PadicNumber& a, const PadicNumber& b);

/// `p^v * [d0,...,d_{k-1}] + O(p^{v+k})`, or `0 + O(p^M)`.
std::string render(const PadicNumber& a);
PadicNumber parse(std::string_view text, const PadicContext& ctx);

// Analytic functions.

/// Teichmuller lift: the (p-1)-th root of unity congruent to a unit mod p.
PadicNumber teichmuller(const PadicNumber& a);
/// exp on v_p(a) >= 1.
PadicNumber exp_p(const PadicNumber& a);
/// log on the 1-units.
PadicNumber log_classical(const PadicNumber& a);
/// Iwasawa branch: log p = 0 and log vanishes on roots of unity.
PadicNumber log_iwasawa(const PadicNumber& a);

}  // namespace padicq
