#pragma once

#include "padicq/padic.hpp"
#include "padicq/rational.hpp"

namespace padicq {

/// A deformation parameter q = 1 + t p^m with p not dividing t and m >= 1.
///
/// q is exact data, so the same parameter can be re-materialized in any
/// context with the same prime.
class QParam {
public:
    const PadicContext& context() const noexcept { return ctx_; }
    const PadicNumber& value() const noexcept { return value_; }
    const PadicNumber& log_q() const noexcept { return log_q_; }
    /// m = v_p(q - 1).
    long one_unit_depth() const noexcept { return depth_; }
    const mpz_class& unit_coefficient() const noexcept { return t_; }
    /// q as an exact rational 1 + t p^m.
    Rational exact() const;

    /// The same q in another context (same prime).
    QParam in(const PadicContext& ctx) const;

private:
    friend QParam q_make(const mpz_class& t, long m, const PadicContext& ctx);
    QParam(PadicContext ctx, mpz_class t, long m, PadicNumber value, PadicNumber log_q)
        : ctx_(std::move(ctx)), t_(std::move(t)), depth_(m), value_(std::move(value)), log_q_(std::move(log_q)) {}

    PadicContext ctx_;
    mpz_class t_;
    long depth_;
    PadicNumber value_;
    PadicNumber log_q_;
};

QParam q_make(const mpz_class& t, long m, const PadicContext& ctx);
inline QParam q_make(long t, long m, const PadicContext& ctx) { return q_make(mpz_class(t), m, ctx); }

/// q^x = exp(x log q), defined when v_p(x) + m >= 1.
PadicNumber q_pow(const QParam& q, const PadicNumber& x);
/// [x]_q = (1 - q^x) / (1 - q).
PadicNumber q_bracket(const PadicNumber& x, const QParam& q);
/// [n]_{-q} = (1 - (-q)^n) / (1 + q) with an exact integer power.
PadicNumber q_bracket_neg(const mpz_class& n, const QParam& q);

/// x converted into q's context; throws ContextMismatch across primes.
PadicNumber in_context(const PadicNumber& x, const QParam& q);

}  // namespace padicq
