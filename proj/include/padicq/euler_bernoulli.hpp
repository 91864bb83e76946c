#pragma once

#include <vector>

#include "padicq/audit.hpp"
#include "padicq/integrals.hpp"
#include "padicq/qanalog.hpp"
#include "padicq/rational.hpp"

namespace padicq {

/// Which exponent the closed form of E_{m,q}(x) carries in its i-th term.
enum class Eq3Variant {
    derived,    ///< q^{ix}, what the binomial expansion of [x+y]^m gives
    as_printed  ///< q^x in every term
};

/// E_{m,q}(x) = [2]_q (1-q)^{-m} sum_i C(m,i) (-1)^i q^{ix} / (1 + q^{i+1}).
PadicNumber q_euler_polynomial(long m, const PadicNumber& x, const QParam& q,
                               Eq3Variant variant = Eq3Variant::derived);
/// Exact argument: evaluated in a widened context, so the result carries the full precision of q.
PadicNumber q_euler_polynomial(long m, const Rational& x, const QParam& q, Eq3Variant variant = Eq3Variant::derived);

/// E_{n,q} = E_{n,q}(0).
PadicNumber q_euler_number(long n, const QParam& q);

constexpr long default_number_bound = 64;

/// Euler numbers from 2/(e^t + 1): 1, -1/2, 0, 1/4, 0, -1/2, ...
Rational classical_euler(long n, long bound = default_number_bound);
/// Bernoulli numbers with B_1 = -1/2.
Rational classical_bernoulli(long n, long bound = default_number_bound);

/// q E_{n,q}(1) + E_{n,q} = [2]_q [n = 0].
AuditReport verify_translation_identity(long n, const QParam& q, long target);

/// beta_{n,q} = I_q(q^{-y} [y]_q^n). Throws NotStabilized unless certified at `target`.
IntegralResult q_bernoulli(long n, const QParam& q, long target, long max_depth,
                           const IntegrationOptions& options = {});
/// beta_{0..max_n,q} from one bosonic pass; every entry must be certified.
std::vector<IntegralResult> q_bernoulli_all(long max_n, const QParam& q, long target, long max_depth,
                                            const IntegrationOptions& options = {});

struct FormalSeries {
    std::vector<Rational> coefficients;  // index 0..K

    long degree() const { return static_cast<long>(coefficients.size()) - 1; }
    FormalSeries derivative() const;
    friend bool operator==(const FormalSeries&, const FormalSeries&) = default;
};

/// log(1+x) truncated at degree K.
FormalSeries log1p_series(long K);
/// (1+x) log(1+x) by Cauchy product, truncated at degree K.
FormalSeries one_plus_x_log1p(long K);
/// x + sum_{n>=1} (-1)^{n+1} x^{n+1} / (n(n+1)), truncated at degree K.
FormalSeries stirling_log_series(long K);

constexpr long max_series_degree = 200;

/// Exact coefficientwise comparison plus the derivative identity ((1+x)log(1+x))' = 1 + log(1+x).
AuditReport verify_log_series(long K);

}  // namespace padicq
