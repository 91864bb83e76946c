#include "padicq/padic.hpp"

#include "padicq/rational.hpp"

#include <algorithm>
#include <regex>
#include <sstream>

namespace padicq {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPrime: return "NonPrime";
        case ErrorCode::EvenPrime: return "EvenPrime";
        case ErrorCode::BadPrecision: return "BadPrecision";
        case ErrorCode::ZeroDenominator: return "ZeroDenominator";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::ContextMismatch: return "ContextMismatch";
        case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorCode::ZeroHasNoValuation: return "ZeroHasNoValuation";
        case ErrorCode::NotAUnit: return "NotAUnit";
        case ErrorCode::OutsideConvergenceDomain: return "OutsideConvergenceDomain";
        case ErrorCode::NotAOneUnit: return "NotAOneUnit";
        case ErrorCode::ZeroArgument: return "ZeroArgument";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::DepthTooSmall: return "DepthTooSmall";
        case ErrorCode::UnitPartDivisible: return "UnitPartDivisible";
        case ErrorCode::ExponentOutOfDomain: return "ExponentOutOfDomain";
        case ErrorCode::IntegrandDomainError: return "IntegrandDomainError";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::BoundExceeded: return "BoundExceeded";
        case ErrorCode::SeriesBudgetExceeded: return "SeriesBudgetExceeded";
        case ErrorCode::NotStabilized: return "NotStabilized";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// PadicContext

struct PadicContext::State {
    long p;
    int n;
    mpz_class p_z;
    std::vector<mpz_class> powers;
};

namespace {

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

constexpr long kMaxPrime = 1L << 30;

}  // namespace

PadicContext PadicContext::create(long prime, int precision) {
    if (prime == 2) throw Error(ErrorCode::EvenPrime, "p = 2 is not supported");
    if (prime > kMaxPrime || !is_prime(prime))
        throw Error(ErrorCode::NonPrime, std::to_string(prime) + " is not an odd prime");
    if (precision < 1) throw Error(ErrorCode::BadPrecision, "precision must be at least 1");
    auto state = std::make_shared<State>();
    state->p = prime;
    state->n = precision;
    state->p_z = prime;
    const std::size_t table = 2 * static_cast<std::size_t>(precision) + 64;
    state->powers.reserve(table);
    state->powers.emplace_back(1);
    for (std::size_t k = 1; k < table; ++k) state->powers.push_back(state->powers.back() * prime);
    return PadicContext(std::move(state));
}

long PadicContext::prime() const noexcept { return state_->p; }
int PadicContext::precision() const noexcept { return state_->n; }
const mpz_class& PadicContext::prime_z() const noexcept { return state_->p_z; }
const mpz_class& PadicContext::modulus() const noexcept { return state_->powers[state_->n]; }

const mpz_class& PadicContext::cached_power(long k) const {
    return state_->powers[static_cast<std::size_t>(k)];
}

mpz_class PadicContext::power(long k) const {
    if (k < 0) throw Error(ErrorCode::InvalidArgument, "negative power of p");
    if (static_cast<std::size_t>(k) < state_->powers.size()) return cached_power(k);
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), state_->p_z.get_mpz_t(), static_cast<unsigned long>(k));
    return r;
}

PadicContext PadicContext::with_precision(int precision) const {
    if (precision == state_->n) return *this;
    return create(state_->p, precision);
}

// ---------------------------------------------------------------------------
// PadicNumber

namespace {

void require_same(const PadicNumber& a, const PadicNumber& b) {
    if (a.context() != b.context())
        throw Error(ErrorCode::ContextMismatch, "operands live in different contexts");
}

}  // namespace

PadicNumber PadicNumber::normalized(const PadicContext& ctx, long valuation, mpz_class value, long digits) {
    PadicNumber r(ctx);
    if (digits <= 0) {
        r.val_ = valuation + digits;
        return r;
    }
    mpz_class mod = ctx.power(digits);
    mpz_fdiv_r(value.get_mpz_t(), value.get_mpz_t(), mod.get_mpz_t());
    if (value == 0) {
        r.val_ = valuation + digits;
        return r;
    }
    long t = static_cast<long>(mpz_remove(value.get_mpz_t(), value.get_mpz_t(), ctx.prime_z().get_mpz_t()));
    valuation += t;
    digits -= t;
    if (digits > ctx.precision()) {
        digits = ctx.precision();
        mpz_fdiv_r(value.get_mpz_t(), value.get_mpz_t(), ctx.modulus().get_mpz_t());
    }
    r.zero_ = false;
    r.val_ = valuation;
    r.rel_prec_ = digits;
    r.unit_ = std::move(value);
    return r;
}

PadicNumber PadicNumber::from_rational(const mpz_class& numerator, const mpz_class& denominator,
                                       const PadicContext& ctx) {
    if (denominator == 0) throw Error(ErrorCode::ZeroDenominator, "from_rational with b = 0");
    if (numerator == 0) return zero(ctx, ctx.precision());
    mpz_class a = numerator;
    mpz_class b = denominator;
    const auto* p = ctx.prime_z().get_mpz_t();
    long v = static_cast<long>(mpz_remove(a.get_mpz_t(), a.get_mpz_t(), p));
    v -= static_cast<long>(mpz_remove(b.get_mpz_t(), b.get_mpz_t(), p));
    const mpz_class& mod = ctx.modulus();
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), b.get_mpz_t(), mod.get_mpz_t());
    mpz_class u = a * inv;
    return normalized(ctx, v, std::move(u), ctx.precision());
}

PadicNumber PadicNumber::from_rational(const Rational& value, const PadicContext& ctx) {
    return from_rational(value.numerator(), value.denominator(), ctx);
}

PadicNumber PadicNumber::from_integer(const mpz_class& value, const PadicContext& ctx) {
    return from_rational(value, 1, ctx);
}

PadicNumber PadicNumber::zero(const PadicContext& ctx, long bound) {
    PadicNumber r(ctx);
    r.val_ = bound;
    return r;
}

PadicNumber PadicNumber::from_residue(const mpz_class& residue, long digits, long shift, const PadicContext& ctx) {
    return normalized(ctx, shift, residue, digits);
}

PadicNumber PadicNumber::from_digits(long valuation, const std::vector<long>& digits, long relative_precision,
                                     const PadicContext& ctx) {
    if (relative_precision < 1 || static_cast<long>(digits.size()) > relative_precision)
        throw Error(ErrorCode::SyntaxError, "digit list longer than the stated precision");
    if (relative_precision > ctx.precision())
        throw Error(ErrorCode::ContextMismatch, "more digits than the context precision");
    if (digits.empty() || digits.front() == 0)
        throw Error(ErrorCode::SyntaxError, "leading digit must be nonzero");
    mpz_class u = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (*it < 0 || *it >= ctx.prime()) throw Error(ErrorCode::SyntaxError, "digit out of range");
        u = u * ctx.prime() + *it;
    }
    return normalized(ctx, valuation, std::move(u), relative_precision);
}

long PadicNumber::valuation() const {
    if (zero_) throw Error(ErrorCode::ZeroHasNoValuation, "ZERO has no valuation");
    return val_;
}

PadicNumber PadicNumber::unit_part() const {
    if (zero_) throw Error(ErrorCode::ZeroHasNoValuation, "ZERO has no unit part");
    PadicNumber r = *this;
    r.val_ = 0;
    return r;
}

std::vector<long> PadicNumber::digits() const {
    std::vector<long> out;
    if (zero_) return out;
    mpz_class u = unit_;
    out.reserve(static_cast<std::size_t>(rel_prec_));
    for (long i = 0; i < rel_prec_; ++i) {
        out.push_back(static_cast<long>(mpz_fdiv_q_ui(u.get_mpz_t(), u.get_mpz_t(), static_cast<unsigned long>(prime()))));
    }
    return out;
}

PadicNumber PadicNumber::with_absolute_precision(long cap) const {
    if (zero_) return zero(ctx_, std::min(val_, cap));
    if (cap >= val_ + rel_prec_) return *this;
    return normalized(ctx_, val_, unit_, cap - val_);
}

PadicNumber PadicNumber::rebased(const PadicContext& ctx) const {
    if (ctx.prime() != prime()) throw Error(ErrorCode::ContextMismatch, "rebase across primes");
    if (zero_) return zero(ctx, val_);
    return normalized(ctx, val_, unit_, rel_prec_);
}

mpz_class PadicNumber::residue(long digits) const {
    if (digits <= 0) return 0;
    if (absolute_precision() < digits)
        throw Error(ErrorCode::PrecisionExhausted, "residue requested beyond known precision");
    if (zero_) return 0;
    if (val_ < 0) throw Error(ErrorCode::InvalidArgument, "residue of a non-integral value");
    if (val_ >= digits) return 0;
    mpz_class r = unit_ * ctx_.power(val_);
    mpz_class mod = ctx_.power(digits);
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), mod.get_mpz_t());
    return r;
}

PadicNumber PadicNumber::pow(const mpz_class& exponent) const {
    if (exponent == 0) {
        if (zero_) throw Error(ErrorCode::InvalidArgument, "0^0 at finite precision");
        return one(ctx_).with_absolute_precision(ctx_.precision());
    }
    if (zero_) {
        if (exponent < 0) throw Error(ErrorCode::DivisionByZero, "negative power of ZERO");
        if (!exponent.fits_slong_p()) return zero(ctx_, val_);
        return zero(ctx_, val_ * exponent.get_si());
    }
    if (!exponent.fits_slong_p() && val_ != 0)
        throw Error(ErrorCode::InvalidArgument, "exponent too large for a non-unit");
    mpz_class mod = ctx_.power(rel_prec_);
    mpz_class u;
    mpz_powm(u.get_mpz_t(), unit_.get_mpz_t(), exponent.get_mpz_t(), mod.get_mpz_t());
    long v = val_ == 0 ? 0 : val_ * exponent.get_si();
    return normalized(ctx_, v, std::move(u), rel_prec_);
}

PadicNumber PadicNumber::operator-() const {
    if (zero_) return *this;
    return normalized(ctx_, val_, -unit_, rel_prec_);
}

PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
    require_same(a, b);
    const PadicContext& ctx = a.ctx_;
    long abs_prec = std::min(a.absolute_precision(), b.absolute_precision());
    if (a.zero_ && b.zero_) return PadicNumber::zero(ctx, abs_prec);
    if (a.zero_) return b.with_absolute_precision(abs_prec);
    if (b.zero_) return a.with_absolute_precision(abs_prec);
    long w = std::min(a.val_, b.val_);
    if (abs_prec <= w) return PadicNumber::zero(ctx, abs_prec);
    mpz_class s = a.unit_;
    if (a.val_ > w) s *= ctx.power(a.val_ - w);
    if (b.val_ > w) {
        mpz_class t = b.unit_ * ctx.power(b.val_ - w);
        s += t;
    } else {
        s += b.unit_;
    }
    return PadicNumber::normalized(ctx, w, std::move(s), abs_prec - w);
}

PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }

PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
    require_same(a, b);
    const PadicContext& ctx = a.ctx_;
    if (a.zero_ && b.zero_) return PadicNumber::zero(ctx, a.val_ + b.val_);
    if (a.zero_) return PadicNumber::zero(ctx, a.val_ + b.val_);
    if (b.zero_) return PadicNumber::zero(ctx, a.val_ + b.val_);
    long k = std::min(a.rel_prec_, b.rel_prec_);
    mpz_class u = a.unit_ * b.unit_;
    return PadicNumber::normalized(ctx, a.val_ + b.val_, std::move(u), k);
}

PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) {
    require_same(a, b);
    const PadicContext& ctx = a.ctx_;
    if (b.zero_) {
        if (b.val_ >= ctx.precision()) throw Error(ErrorCode::DivisionByZero, "division by zero");
        throw Error(ErrorCode::PrecisionExhausted, "divisor is indistinguishable from 0 at its precision");
    }
    if (a.zero_) return PadicNumber::zero(ctx, a.val_ - b.val_);
    long k = std::min(a.rel_prec_, b.rel_prec_);
    const mpz_class mod = ctx.power(k);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), b.unit_.get_mpz_t(), mod.get_mpz_t());
    mpz_class u = a.unit_ * inv;
    return PadicNumber::normalized(ctx, a.val_ - b.val_, std::move(u), k);
}

bool operator==(const PadicNumber& a, const PadicNumber& b) {
    if (a.ctx_.prime() != b.ctx_.prime() || a.zero_ != b.zero_ || a.val_ != b.val_) return false;
    if (a.zero_) return true;
    return a.rel_prec_ == b.rel_prec_ && a.unit_ == b.unit_;
}

PadicNumber arith(const PadicNumber& a, const PadicNumber& b, ArithOp op) {
    switch (op) {
        case ArithOp::add: return a + b;
        case ArithOp::sub: return a - b;
        case ArithOp::mul: return a * b;
        case ArithOp::div: return a / b;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown arithmetic operation");
}

long agreement(const PadicNumber& a, const PadicNumber& b) {
    PadicNumber d = a - b;
    return d.is_zero() ? d.absolute_precision() : d.valuation();
}

// ---------------------------------------------------------------------------
// Text form

std::string render(const PadicNumber& a) {
    std::ostringstream os;
    const long p = a.prime();
    if (a.is_zero()) {
        os << "0 + O(" << p << "^" << a.absolute_precision() << ")";
        return os.str();
    }
    os << p << "^" << a.valuation() << " * [";
    auto ds = a.digits();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) os << ",";
        os << ds[i];
    }
    os << "] + O(" << p << "^" << a.absolute_precision() << ")";
    return os.str();
}

PadicNumber parse(std::string_view text, const PadicContext& ctx) {
    static const std::regex zero_re(R"(^\s*0\s*\+\s*O\(\s*(\d+)\s*\^\s*(-?\d+)\s*\)\s*$)");
    static const std::regex value_re(
        R"(^\s*(\d+)\s*\^\s*(-?\d+)\s*\*\s*\[([0-9,\s]*)\]\s*\+\s*O\(\s*(\d+)\s*\^\s*(-?\d+)\s*\)\s*$)");
    std::string s(text);
    std::smatch m;
    auto check_prime = [&](const std::string& digits) {
        if (std::stol(digits) != ctx.prime())
            throw Error(ErrorCode::ContextMismatch, "prime in text differs from context");
    };
    try {
        if (std::regex_match(s, m, zero_re)) {
            check_prime(m[1]);
            return PadicNumber::zero(ctx, std::stol(m[2]));
        }
        if (std::regex_match(s, m, value_re)) {
            check_prime(m[1]);
            if (m[1] != m[4]) throw Error(ErrorCode::SyntaxError, "inconsistent primes in '" + s + "'");
            long v = std::stol(m[2]);
            long abs_prec = std::stol(m[5]);
            std::vector<long> digits;
            std::string list = m[3];
            std::stringstream ss(list);
            std::string item;
            while (std::getline(ss, item, ',')) {
                auto b = item.find_first_not_of(" \t");
                if (b == std::string::npos) throw Error(ErrorCode::SyntaxError, "empty digit in '" + s + "'");
                digits.push_back(std::stol(item.substr(b)));
            }
            return PadicNumber::from_digits(v, digits, abs_prec - v, ctx);
        }
    } catch (const std::out_of_range&) {
        throw Error(ErrorCode::SyntaxError, "number out of range in '" + s + "'");
    }
    throw Error(ErrorCode::SyntaxError, "cannot parse '" + s + "'");
}

}  // namespace padicq
