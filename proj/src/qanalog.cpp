#include "padicq/qanalog.hpp"

namespace padicq {

Rational QParam::exact() const {
    return Rational(1) + Rational(mpz_class(t_ * ctx_.power(depth_)));
}

QParam QParam::in(const PadicContext& ctx) const {
    if (ctx == ctx_) return *this;
    return q_make(t_, depth_, ctx);
}

QParam q_make(const mpz_class& t, long m, const PadicContext& ctx) {
    if (m < 1) throw Error(ErrorCode::DepthTooSmall, "q - 1 must be divisible by p");
    if (t % ctx.prime() == 0) throw Error(ErrorCode::UnitPartDivisible, "t must be prime to p");
    PadicNumber value = PadicNumber::from_integer(1 + t * ctx.power(m), ctx);
    PadicNumber log_q = log_classical(value);
    return QParam(ctx, t, m, std::move(value), std::move(log_q));
}

PadicNumber in_context(const PadicNumber& x, const QParam& q) {
    if (x.context() == q.context()) return x;
    return x.rebased(q.context());
}

PadicNumber q_pow(const QParam& q, const PadicNumber& x) {
    PadicNumber y = in_context(x, q);
    if (y.is_zero()) {
        if (y.absolute_precision() + q.one_unit_depth() < 1)
            throw Error(ErrorCode::ExponentOutOfDomain, "exponent not known to precision");
        return exp_p(y * q.log_q());
    }
    if (y.valuation() + q.one_unit_depth() < 1)
        throw Error(ErrorCode::ExponentOutOfDomain, "q^x needs v_p(x) + m >= 1");
    return exp_p(y * q.log_q());
}

PadicNumber q_bracket(const PadicNumber& x, const QParam& q) {
    const PadicNumber one = PadicNumber::one(q.context());
    return (one - q_pow(q, x)) / (one - q.value());
}

PadicNumber q_bracket_neg(const mpz_class& n, const QParam& q) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "[n]_{-q} needs n >= 0");
    const PadicNumber one = PadicNumber::one(q.context());
    PadicNumber power = (-q.value()).pow(n);
    return (one - power) / (one + q.value());
}

}  // namespace padicq
