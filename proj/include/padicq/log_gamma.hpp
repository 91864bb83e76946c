#pragma once

#include <optional>

#include "padicq/audit.hpp"
#include "padicq/euler_bernoulli.hpp"
#include "padicq/integrals.hpp"
#include "padicq/qanalog.hpp"
#include "padicq/rational.hpp"

namespace padicq {

/// A point x of Q_p outside Z_p at which q^x is defined: v_p(x) <= -1 and v_p(x) + m >= 1.
class GammaArgument {
public:
    /// Throws InvalidArgument when x lies in Z_p, ExponentOutOfDomain when v_p(x) + m < 1.
    static GammaArgument make(const Rational& x, const QParam& q);
    static GammaArgument make(const PadicNumber& x, const QParam& q);

    long valuation() const noexcept { return valuation_; }
    const std::optional<Rational>& exact() const noexcept { return exact_; }
    /// x in ctx: exact when the argument is rational, otherwise as known.
    PadicNumber in(const PadicContext& ctx) const;
    /// x + k (still outside Z_p).
    GammaArgument shifted(long k) const;
    std::string label() const;

private:
    GammaArgument(PadicNumber value, std::optional<Rational> exact, long valuation)
        : value_(std::move(value)), exact_(std::move(exact)), valuation_(valuation) {}
    static void validate(long valuation, const QParam& q);

    PadicNumber value_;
    std::optional<Rational> exact_;
    long valuation_;
};

enum class CoefficientVariant {
    derived_coefficient,  ///< q^x E_{1,q} in front of log [x]_q
    as_printed            ///< -q^x / [2]_{q^2}
};

const char* variant_name(CoefficientVariant v);

struct SeriesEvaluation {
    PadicNumber value;
    long terms_used = 0;
    /// every omitted term has valuation at least this
    long tail_valuation_bound = 0;
    CoefficientVariant variant = CoefficientVariant::derived_coefficient;
};

constexpr long default_series_cap = 200;

/// G_{p,q}(x) = I_{-q}([x+z]_q (log [x+z]_q - 1)). Throws NotStabilized unless certified at `target`.
IntegralResult gamma_direct(const GammaArgument& x, const QParam& q, long target, long max_depth,
                            const IntegrationOptions& options = {});

/// (X + q^x E_{1,q}) log X - X + sum_{n>=1} (-q^x)^{n+1} E_{n+1,q} / (n(n+1) X^n), X = [x]_q,
/// truncated once every omitted term has valuation above `target`.
SeriesEvaluation gamma_series(const GammaArgument& x, const QParam& q, long target,
                              CoefficientVariant variant = CoefficientVariant::derived_coefficient,
                              long max_terms = default_series_cap);

/// q^x (E_{1,q} + 1/[2]_{q^2}) log [x]_q: derived minus printed series.
PadicNumber printed_coefficient_residual(const GammaArgument& x, const QParam& q);

enum class GammaEvaluator { direct, series };

struct GammaAuditOptions {
    long max_depth = 0;  // 0: largest depth within 10^6 summands
    IntegrationOptions integration;
    long series_cap = default_series_cap;
};

/// Series (derived coefficient) against the direct integral; the printed variant is quantified alongside.
AuditReport verify_theorem_a(const GammaArgument& x, const QParam& q, long target, const GammaAuditOptions& options = {});

/// q G(x+1) + G(x) = [2]_q [x]_q (log [x]_q - 1). The as_printed series variant is report-only.
AuditReport verify_gamma_functional_equation(const GammaArgument& x, const QParam& q, long target,
                                             GammaEvaluator evaluator,
                                             CoefficientVariant variant = CoefficientVariant::derived_coefficient,
                                             const GammaAuditOptions& options = {});

/// T_{p,q}(x) = I_q(q^{-y-x} [x+y]_q (log [x+y]_q - 1)). Throws NotStabilized unless certified.
IntegralResult t_gamma_direct(const GammaArgument& x, const QParam& q, long target, long max_depth,
                              const IntegrationOptions& options = {});

/// (q^{-x} X b_0 + b_1) log X - q^{-x} X b_0 + sum_{n>=1} (-1)^{n+1} q^{nx} b_{n+1} / (n(n+1) X^n)
/// with b_n = beta_{n,q} from the bosonic oracle.
struct TSeriesEvaluation {
    PadicNumber value;
    long terms_used = 0;
    long tail_valuation_bound = 0;
    /// min stability over the beta values used
    long stability_valuation = 0;
    long depth_used = 0;
};
TSeriesEvaluation t_gamma_series(const GammaArgument& x, const QParam& q, long target, long max_depth,
                                 const IntegrationOptions& options = {}, long max_terms = default_series_cap);

/// Compares the conjectured T series with the direct integral at the certified depth and one
/// depth deeper. Report-only: no verdict.
AuditReport t_gamma_series_conjecture(const GammaArgument& x, const QParam& q, long target,
                                      const GammaAuditOptions& options = {});

/// [x + z]_q = [x]_q + q^x [z]_q.
AuditReport verify_bracket_addition(const PadicNumber& x, const PadicNumber& z, const QParam& q, long target);

/// [x+z]_q (log [x+z]_q - 1) against its expansion around [x]_q, for an integer z.
AuditReport verify_decomposition(const GammaArgument& x, long z, const QParam& q, long target);

}  // namespace padicq
