#include "padicq/rational.hpp"

#include "padicq/errors.hpp"

namespace padicq {

namespace {

mpz_class parse_integer(std::string_view text, std::string_view whole) {
    if (text.empty()) throw Error(ErrorCode::SyntaxError, "bad rational '" + std::string(whole) + "'");
    std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
    if (start == text.size()) throw Error(ErrorCode::SyntaxError, "bad rational '" + std::string(whole) + "'");
    for (std::size_t i = start; i < text.size(); ++i) {
        if (text[i] < '0' || text[i] > '9')
            throw Error(ErrorCode::SyntaxError, "bad rational '" + std::string(whole) + "'");
    }
    std::string digits(text.substr(text[0] == '+' ? 1 : 0));
    return mpz_class(digits, 10);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

Rational::Rational(const mpz_class& numerator, const mpz_class& denominator) {
    if (denominator == 0) throw Error(ErrorCode::ZeroDenominator, "rational with zero denominator");
    value_ = mpq_class(numerator, denominator);
    value_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
    std::string_view s = trim(text);
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(s, text));
    mpz_class num = parse_integer(trim(s.substr(0, slash)), text);
    mpz_class den = parse_integer(trim(s.substr(slash + 1)), text);
    return Rational(num, den);
}

std::string Rational::to_string() const {
    if (is_integer()) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.value_ == 0) throw Error(ErrorCode::DivisionByZero, "rational division by zero");
    return Rational(mpq_class(a.value_ / b.value_));
}

long valuation(const Rational& value, long prime) {
    if (value.get() == 0) throw Error(ErrorCode::ZeroHasNoValuation, "valuation of 0");
    mpz_class p(prime);
    mpz_class num = value.numerator();
    mpz_class den = value.denominator();
    long v = static_cast<long>(mpz_remove(num.get_mpz_t(), num.get_mpz_t(), p.get_mpz_t()));
    v -= static_cast<long>(mpz_remove(den.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t()));
    return v;
}

mpz_class binomial(unsigned long n, unsigned long k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

}  // namespace padicq
