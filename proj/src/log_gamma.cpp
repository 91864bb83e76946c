#include "padicq/log_gamma.hpp"

namespace padicq {

namespace {

long floor_log(long k, long p) {
    long r = 0;
    while (k >= p) {
        k /= p;
        ++r;
    }
    return r;
}

// v_p(n(n+1)) for the series coefficients
long coefficient_loss(long n, long p) {
    long v = 0;
    for (long k : {n, n + 1}) {
        while (k % p == 0) {
            k /= p;
            ++v;
        }
    }
    return v;
}

// Room for the 1/[x]_q^n and 1/(n(n+1)) divisions.
PadicContext series_context(const QParam& q, long e) {
    const PadicContext& ctx = q.context();
    return ctx.with_precision(static_cast<int>(ctx.precision() + 2 * e + 8));
}

PadicContext exact_context(const QParam& q) {
    const PadicContext& ctx = q.context();
    return ctx.with_precision(2 * ctx.precision() + 64);
}

long default_depth(const QParam& q, const GammaAuditOptions& options) {
    return options.max_depth > 0 ? options.max_depth : depth_for_budget(q.context().prime(), 1'000'000);
}

std::string q_label(const QParam& q) {
    return q.unit_coefficient().get_str() + "," + std::to_string(q.one_unit_depth());
}

nlohmann::ordered_json gamma_params(const GammaArgument& x, const QParam& q) {
    return {{"p", q.context().prime()}, {"precision", q.context().precision()}, {"q", q_label(q)}, {"x", x.label()}};
}

void record_error(AuditReport& r, const Error& e) {
    r.verdict = r.verdict.has_value() ? std::optional<bool>(false) : std::nullopt;
    r.extra["error_code"] = error_code_name(e.code());
    r.extra["error"] = e.what();
}

struct SeriesPieces {
    PadicContext ctx;
    QParam q;
    PadicNumber x;
    PadicNumber bracket;  // X = [x]_q
    PadicNumber qx;       // q^x
    PadicNumber log_bracket;
};

SeriesPieces series_pieces(const GammaArgument& x, const QParam& q) {
    PadicContext ctx = series_context(q, -x.valuation());
    QParam qw = q.in(ctx);
    PadicNumber xw = x.in(ctx);
    PadicNumber bracket = q_bracket(xw, qw);
    PadicNumber qx = q_pow(qw, xw);
    PadicNumber lb = log_iwasawa(bracket);
    return {ctx, qw, xw, bracket, qx, lb};
}

}  // namespace

void GammaArgument::validate(long valuation, const QParam& q) {
    if (valuation >= 0) throw Error(ErrorCode::InvalidArgument, "x must lie outside Z_p");
    if (valuation + q.one_unit_depth() < 1)
        throw Error(ErrorCode::ExponentOutOfDomain, "q^x needs v_p(x) + m >= 1");
}

GammaArgument GammaArgument::make(const Rational& x, const QParam& q) {
    if (x == Rational(0)) throw Error(ErrorCode::InvalidArgument, "x must lie outside Z_p");
    const long v = padicq::valuation(x, q.context().prime());
    validate(v, q);
    return GammaArgument(PadicNumber::from_rational(x, exact_context(q)), x, v);
}

GammaArgument GammaArgument::make(const PadicNumber& x, const QParam& q) {
    if (x.prime() != q.context().prime()) throw Error(ErrorCode::ContextMismatch, "x and q use different primes");
    if (x.is_zero()) throw Error(ErrorCode::InvalidArgument, "x must lie outside Z_p");
    validate(x.valuation(), q);
    return GammaArgument(x, std::nullopt, x.valuation());
}

PadicNumber GammaArgument::in(const PadicContext& ctx) const {
    if (exact_) return PadicNumber::from_rational(*exact_, ctx);
    return value_.rebased(ctx);
}

GammaArgument GammaArgument::shifted(long k) const {
    if (exact_) return GammaArgument(PadicNumber::from_rational(*exact_ + Rational(k), value_.context()), *exact_ + Rational(k), valuation_);
    return GammaArgument(value_ + PadicNumber::from_integer(k, value_.context()), std::nullopt, valuation_);
}

std::string GammaArgument::label() const { return exact_ ? exact_->to_string() : render(value_); }

const char* variant_name(CoefficientVariant v) {
    return v == CoefficientVariant::derived_coefficient ? "derived_coefficient" : "as_printed";
}

IntegralResult gamma_direct(const GammaArgument& x, const QParam& q, long target, long max_depth,
                            const IntegrationOptions& options) {
    auto r = fermionic_integral(IntegrandSpec::gamma_kernel(x.in(exact_context(q))), q, target, max_depth, options);
    if (!r.converged)
        throw Error(ErrorCode::NotStabilized,
                    "G(" + x.label() + ") stable only to " + std::to_string(r.stability_valuation) + " digits");
    return r;
}

SeriesEvaluation gamma_series(const GammaArgument& x, const QParam& q, long target, CoefficientVariant variant,
                              long max_terms) {
    const long e = -x.valuation();
    const long p = q.context().prime();
    SeriesPieces s = series_pieces(x, q);
    const PadicContext& ctx = s.ctx;
    const PadicNumber one = PadicNumber::one(ctx);

    PadicNumber lead = variant == CoefficientVariant::derived_coefficient
                           ? s.qx * q_euler_number(1, s.q)
                           : -s.qx / (one + s.q.value() * s.q.value());
    PadicNumber value = (s.bracket + lead) * s.log_bracket - s.bracket;

    const PadicNumber minus_qx = -s.qx;
    PadicNumber sign_power = minus_qx;  // (-q^x)^{n+1}
    PadicNumber bracket_power = one;    // X^n
    long n = 1;
    for (;; ++n) {
        // n e - v_p(n(n+1)) >= n e - floor(log_p(n+1)), nondecreasing in n
        const long tail = n * e - floor_log(n + 1, p);
        if (tail > target) break;
        if (n > max_terms)
            throw Error(ErrorCode::SeriesBudgetExceeded,
                        "series needs more than " + std::to_string(max_terms) + " terms");
        sign_power *= minus_qx;
        bracket_power *= s.bracket;
        PadicNumber term = sign_power * q_euler_number(n + 1, s.q) /
                           (PadicNumber::from_integer(n * (n + 1), ctx) * bracket_power);
        if (!term.is_zero() && term.valuation() < n * e - coefficient_loss(n, p))
            throw Error(ErrorCode::InvalidArgument, "series term below its valuation bound");
        value += term;
    }
    const long tail = n * e - floor_log(n + 1, p);
    return {value.with_absolute_precision(tail).rebased(q.context()), n - 1, tail, variant};
}

PadicNumber printed_coefficient_residual(const GammaArgument& x, const QParam& q) {
    SeriesPieces s = series_pieces(x, q);
    const PadicNumber one = PadicNumber::one(s.ctx);
    PadicNumber inv_two_q2 = one / (one + s.q.value() * s.q.value());
    return (s.qx * (q_euler_number(1, s.q) + inv_two_q2) * s.log_bracket).rebased(q.context());
}

namespace {

void add_printed_residual(AuditReport& r, const GammaArgument& x, const QParam& q, const PadicNumber& direct,
                          const SeriesEvaluation& printed) {
    PadicNumber residual = direct - printed.value;
    PadicNumber predicted = printed_coefficient_residual(x, q);
    r.extra["as_printed_value"] = render(printed.value);
    r.extra["as_printed_residual"] = render(residual);
    r.extra["predicted_residual"] = render(predicted);
    r.extra["residual_agreement"] = agreement(residual, predicted);
}

}  // namespace

AuditReport verify_theorem_a(const GammaArgument& x, const QParam& q, long target, const GammaAuditOptions& options) {
    AuditReport r;
    r.identity = "thmA";
    r.params = gamma_params(x, q);
    r.target = target;
    r.verdict = false;
    try {
        const long n = q.context().precision();
        auto direct = gamma_direct(x, q, target, default_depth(q, options), options.integration);
        auto series = gamma_series(x, q, n, CoefficientVariant::derived_coefficient, options.series_cap);
        r.lhs = render(series.value);
        r.rhs = render(direct.value);
        r.diff_valuation = agreement(series.value, direct.value);
        r.verdict = r.diff_valuation >= target;
        r.extra["terms_used"] = series.terms_used;
        r.extra["tail_valuation_bound"] = series.tail_valuation_bound;
        r.extra["depth_used"] = direct.depth_used;
        r.extra["stability_valuation"] = direct.stability_valuation;
        add_printed_residual(r, x, q, direct.value,
                             gamma_series(x, q, n, CoefficientVariant::as_printed, options.series_cap));
    } catch (const Error& e) {
        record_error(r, e);
    }
    return r;
}

AuditReport verify_gamma_functional_equation(const GammaArgument& x, const QParam& q, long target,
                                             GammaEvaluator evaluator, CoefficientVariant variant,
                                             const GammaAuditOptions& options) {
    AuditReport r;
    r.identity = "eq12";
    r.params = gamma_params(x, q);
    r.params["evaluator"] = evaluator == GammaEvaluator::direct ? "direct" : "series";
    if (evaluator == GammaEvaluator::series) r.params["variant"] = variant_name(variant);
    r.target = target;
    const bool report_only = evaluator == GammaEvaluator::series && variant == CoefficientVariant::as_printed;
    if (!report_only) r.verdict = false;
    try {
        const long n = q.context().precision();
        const GammaArgument x1 = x.shifted(1);
        auto evaluate = [&](const GammaArgument& at) {
            if (evaluator == GammaEvaluator::direct)
                return gamma_direct(at, q, target, default_depth(q, options), options.integration).value;
            return gamma_series(at, q, n, variant, options.series_cap).value;
        };
        PadicNumber g0 = evaluate(x);
        PadicNumber g1 = evaluate(x1);
        PadicNumber lhs = q.value() * g1 + g0;

        SeriesPieces s = series_pieces(x, q);
        const PadicNumber one = PadicNumber::one(s.ctx);
        PadicNumber rhs = ((one + s.q.value()) * s.bracket * (s.log_bracket - one)).rebased(q.context());
        r.lhs = render(lhs);
        r.rhs = render(rhs);
        r.diff_valuation = agreement(lhs, rhs);
        if (!report_only) r.verdict = r.diff_valuation >= target;
        if (report_only) {
            auto direct = gamma_direct(x, q, target, default_depth(q, options), options.integration);
            add_printed_residual(r, x, q, direct.value, gamma_series(x, q, n, variant, options.series_cap));
        }
    } catch (const Error& e) {
        record_error(r, e);
    }
    return r;
}

IntegralResult t_gamma_direct(const GammaArgument& x, const QParam& q, long target, long max_depth,
                              const IntegrationOptions& options) {
    auto r = bosonic_integral(IntegrandSpec::gamma_kernel(x.in(exact_context(q))).with_weight(), q, target,
                              max_depth, options);
    if (!r.converged)
        throw Error(ErrorCode::NotStabilized,
                    "T(" + x.label() + ") stable only to " + std::to_string(r.stability_valuation) + " digits");
    PadicContext wide = series_context(q, -x.valuation());
    PadicNumber q_minus_x = q_pow(q.in(wide), -x.in(wide)).rebased(q.context());
    r.value = q_minus_x * r.value;
    return r;
}

TSeriesEvaluation t_gamma_series(const GammaArgument& x, const QParam& q, long target, long max_depth,
                                 const IntegrationOptions& options, long max_terms) {
    const long e = -x.valuation();
    const long p = q.context().prime();
    // beta_n is assumed to satisfy v_p >= -1, hence the extra digit in the tail bound
    long terms = 0;
    while ((terms + 1) * e - floor_log(terms + 2, p) - 1 <= target) {
        ++terms;
        if (terms > max_terms)
            throw Error(ErrorCode::SeriesBudgetExceeded,
                        "series needs more than " + std::to_string(max_terms) + " terms");
    }
    const long tail = (terms + 1) * e - floor_log(terms + 2, p) - 1;
    // the beta_0 term carries [x]_q, which costs e digits
    auto betas = q_bernoulli_all(terms + 1, q, target + e + 1, max_depth, options);

    SeriesPieces s = series_pieces(x, q);
    const PadicContext& ctx = s.ctx;
    const PadicNumber one = PadicNumber::one(ctx);
    auto beta = [&](long n) { return betas[static_cast<std::size_t>(n)].value.rebased(ctx); };
    PadicNumber q_minus_x = one / s.qx;
    PadicNumber value = (q_minus_x * s.bracket * beta(0) + beta(1)) * s.log_bracket - q_minus_x * s.bracket * beta(0);
    PadicNumber q_nx = one;
    PadicNumber bracket_power = one;
    for (long n = 1; n <= terms; ++n) {
        q_nx *= s.qx;
        bracket_power *= s.bracket;
        PadicNumber term = q_nx * beta(n + 1) / (PadicNumber::from_integer(n * (n + 1), ctx) * bracket_power);
        value += n % 2 ? term : -term;
    }
    long stability = betas.front().stability_valuation;
    long depth = 0;
    for (const auto& b : betas) {
        stability = std::min(stability, b.stability_valuation);
        depth = std::max(depth, b.depth_used);
    }
    return {value.with_absolute_precision(tail).rebased(q.context()), terms, tail, stability - e, depth};
}

AuditReport t_gamma_series_conjecture(const GammaArgument& x, const QParam& q, long target,
                                      const GammaAuditOptions& options) {
    AuditReport r;
    r.identity = "t-conjecture";
    r.params = gamma_params(x, q);
    r.target = target;
    try {
        const long depth = default_depth(q, options);
        auto direct = t_gamma_direct(x, q, target, depth, options.integration);
        auto series = t_gamma_series(x, q, target, depth, options.integration, options.series_cap);
        r.lhs = render(direct.value);
        r.rhs = render(series.value);
        r.diff_valuation = agreement(direct.value, series.value);
        r.extra["direct_stability"] = direct.stability_valuation;
        r.extra["series_stability"] = series.stability_valuation;
        r.extra["direct_depth"] = direct.depth_used;
        r.extra["series_depth"] = series.depth_used;
        r.extra["terms_used"] = series.terms_used;
        r.extra["tail_valuation_bound"] = series.tail_valuation_bound;

        // the same comparison one depth deeper
        IntegrationOptions deeper = options.integration;
        deeper.min_depth = std::max(direct.depth_used, series.depth_used) + 1;
        const long deeper_max = std::max(depth, deeper.min_depth);
        auto direct2 = t_gamma_direct(x, q, target, deeper_max, deeper);
        auto series2 = t_gamma_series(x, q, target, deeper_max, deeper, options.series_cap);
        r.extra["next_depth"] = deeper.min_depth;
        r.extra["diff_valuation_next_depth"] = agreement(direct2.value, series2.value);
    } catch (const Error& e) {
        record_error(r, e);
    }
    return r;
}

AuditReport verify_bracket_addition(const PadicNumber& x, const PadicNumber& z, const QParam& q, long target) {
    PadicNumber xw = in_context(x, q);
    PadicNumber zw = in_context(z, q);
    PadicNumber lhs = q_bracket(xw + zw, q);
    PadicNumber rhs = q_bracket(xw, q) + q_pow(q, xw) * q_bracket(zw, q);
    AuditReport r;
    r.identity = "eq9";
    r.params = {{"p", q.context().prime()}, {"precision", q.context().precision()}, {"q", q_label(q)},
                {"x", render(x)}, {"z", render(z)}};
    r.lhs = render(lhs);
    r.rhs = render(rhs);
    r.diff_valuation = agreement(lhs, rhs);
    r.target = target;
    r.verdict = r.diff_valuation >= target;
    return r;
}

AuditReport verify_decomposition(const GammaArgument& x, long z, const QParam& q, long target) {
    const long e = -x.valuation();
    const long p = q.context().prime();
    const long n_ctx = q.context().precision();
    SeriesPieces s = series_pieces(x, q);
    const PadicContext& ctx = s.ctx;
    const PadicNumber one = PadicNumber::one(ctx);
    PadicNumber zb = q_bracket(PadicNumber::from_integer(z, ctx), s.q);
    PadicNumber shifted = q_bracket(s.x + PadicNumber::from_integer(z, ctx), s.q);
    PadicNumber lhs = shifted * (log_iwasawa(shifted) - one);

    // q^x [z]_q / [x]_q has valuation >= e; stop once omitted terms fall below p^N
    long k = 1;
    while ((k + 1) * e - floor_log(k + 2, p) <= n_ctx) ++k;
    const PadicNumber qz = s.qx * zb;
    const PadicNumber ratio = qz / s.bracket;
    PadicNumber sum = PadicNumber::zero(ctx, 4 * n_ctx);
    PadicNumber ratio_power = ratio;
    for (long n = 1; n <= k; ++n) {
        ratio_power *= ratio;
        PadicNumber term = ratio_power / PadicNumber::from_integer(n * (n + 1), ctx);
        sum += n % 2 ? term : -term;
    }
    PadicNumber tail_part = s.bracket * sum + (s.bracket + qz) * s.log_bracket - s.bracket;
    PadicNumber rhs = qz + tail_part - qz;
    PadicNumber rhs_bare = zb + tail_part - zb;  // bare [z]_q in the outer two places

    AuditReport r;
    r.identity = "eq10";
    r.params = gamma_params(x, q);
    r.params["z"] = z;
    r.lhs = render(lhs.rebased(q.context()));
    r.rhs = render(rhs.rebased(q.context()));
    r.diff_valuation = agreement(lhs.rebased(q.context()), rhs.rebased(q.context()));
    r.target = target;
    r.verdict = r.diff_valuation >= target;
    r.extra["terms_used"] = k;
    r.extra["bare_z_variant_agreement"] = agreement(rhs_bare.rebased(q.context()), rhs.rebased(q.context()));
    return r;
}

}  // namespace padicq
