#include "padicq/padic.hpp"

namespace padicq {

namespace {

// floor(log_p k) for k >= 1.
long floor_log(long k, long p) {
    long r = 0;
    while (k >= p) {
        k /= p;
        ++r;
    }
    return r;
}

}  // namespace

PadicNumber teichmuller(const PadicNumber& a) {
    if (a.is_zero() || a.valuation() != 0) throw Error(ErrorCode::NotAUnit, "teichmuller needs a unit");
    const PadicContext& ctx = a.context();
    const long k = a.relative_precision();
    const mpz_class mod = ctx.power(k);
    const mpz_class& p = ctx.prime_z();
    mpz_class x = a.mantissa();
    mpz_class y;
    // x -> x^p contracts distances by p, so k rounds reach the fixed point mod p^k.
    for (long i = 0; i <= k; ++i) {
        mpz_powm(y.get_mpz_t(), x.get_mpz_t(), p.get_mpz_t(), mod.get_mpz_t());
        if (y == x) break;
        x.swap(y);
    }
    return PadicNumber::from_residue(x, k, 0, ctx);
}

PadicNumber exp_p(const PadicNumber& a) {
    const PadicContext& ctx = a.context();
    const long p = ctx.prime();
    const long target = ctx.precision();
    if (a.is_zero()) {
        if (a.absolute_precision() < 1)
            throw Error(ErrorCode::OutsideConvergenceDomain, "argument not known to lie in pZ_p");
        return PadicNumber::one(ctx).with_absolute_precision(std::min<long>(target, a.absolute_precision()));
    }
    const long v = a.valuation();
    if (v < 1) throw Error(ErrorCode::OutsideConvergenceDomain, "exp_p needs v_p(a) >= 1");
    PadicNumber sum = PadicNumber::one(ctx);
    PadicNumber term = sum;
    // v(a^k / k!) >= k v - (k-1)/(p-1), increasing in k.
    for (long k = 1;; ++k) {
        if (k * v * (p - 1) - (k - 1) >= target * (p - 1)) break;
        term = term * a / PadicNumber::from_integer(k, ctx);
        sum += term;
    }
    return sum.with_absolute_precision(target);
}

PadicNumber log_classical(const PadicNumber& a) {
    const PadicContext& ctx = a.context();
    if (a.is_zero() || a.valuation() != 0) throw Error(ErrorCode::NotAOneUnit, "log needs a 1-unit");
    const PadicNumber one = PadicNumber::one(ctx);
    const PadicNumber b = a - one;
    if (b.is_zero()) {
        if (b.absolute_precision() < 1) throw Error(ErrorCode::NotAOneUnit, "argument not known to be a 1-unit");
        return b;
    }
    const long vb = b.valuation();
    if (vb < 1) throw Error(ErrorCode::NotAOneUnit, "log needs a = 1 mod p");
    const long p = ctx.prime();
    const long target = vb + ctx.precision();
    PadicNumber sum = PadicNumber::zero(ctx, target);
    PadicNumber power = b;
    // v(b^k / k) >= k vb - floor(log_p k), nondecreasing in k.
    for (long k = 1;; ++k) {
        if (k * vb - floor_log(k, p) >= target) break;
        PadicNumber term = power / PadicNumber::from_integer(k, ctx);
        if (k % 2 == 1) sum += term;
        else sum -= term;
        power *= b;
    }
    return sum.with_absolute_precision(target);
}

PadicNumber log_iwasawa(const PadicNumber& a) {
    if (a.is_zero()) throw Error(ErrorCode::ZeroArgument, "log of ZERO");
    PadicNumber u = a.unit_part();
    return log_classical(u / teichmuller(u));
}

}  // namespace padicq
