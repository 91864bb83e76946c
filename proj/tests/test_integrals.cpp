#include <doctest.h>

#include "padicq/integrals.hpp"
#include "padicq/rational.hpp"
#include "test_support.hpp"

#include <random>

using namespace padicq;
using padicq::testing::code_of;

namespace {

constexpr long kTarget = 12;

PadicNumber num(long a, long b, const PadicContext& ctx) { return PadicNumber::from_rational(a, b, ctx); }

long default_depth(long p) { return depth_for_budget(p, 1'000'000); }

// Bosonic weighted moment of [y]_q^n by binomial expansion of (q^y - 1)^n:
//   ((q-1)/log q) (q-1)^{-n} sum_j C(n,j) (-1)^{n-j} I_j,  I_0 = 1, I_j = j log q / (q^j - 1).
PadicNumber beta_closed_form(long n, const QParam& q) {
    const PadicContext& ctx = q.context();
    const PadicNumber one = PadicNumber::one(ctx);
    const PadicNumber& qv = q.value();
    const PadicNumber& lq = q.log_q();
    PadicNumber sum = PadicNumber::zero(ctx, 4 * ctx.precision());
    for (long j = 0; j <= n; ++j) {
        PadicNumber ij = j == 0 ? one : PadicNumber::from_integer(j, ctx) * lq / (qv.pow(j) - one);
        PadicNumber term = PadicNumber::from_integer(binomial(n, j), ctx) * ij;
        sum += (n - j) % 2 ? -term : term;
    }
    return (qv - one) / lq * sum / (qv - one).pow(n);
}

void check_close(const IntegralResult& r, const PadicNumber& expected, long target = kTarget) {
    CHECK(r.converged);
    CHECK(r.stability_valuation >= target);
    CHECK(agreement(r.value, expected) >= target);
}

}  // namespace

TEST_CASE("depth budget") {
    CHECK(depth_for_budget(3, 1'000'000) == 12);
    CHECK(depth_for_budget(5, 1'000'000) == 8);
    CHECK(depth_for_budget(7, 1'000'000) == 7);
    CHECK(depth_for_budget(7, 6) == 0);
    auto ctx = PadicContext::create(3, 30);
    auto q = q_make(1, 2, ctx);
    CHECK(code_of([&] { fermionic_integral(IntegrandSpec::q_power(0), q, 10, 15, {}); }) ==
          ErrorCode::BudgetExceeded);
    IntegrationOptions small;
    small.max_summands = 100;
    CHECK(code_of([&] { fermionic_integral(IntegrandSpec::q_power(0), q, 10, 5, small); }) ==
          ErrorCode::BudgetExceeded);
}

TEST_CASE("fermionic closed forms") {
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PadicContext::create(p, 30);
        for (auto [t, m] : {std::pair{1L, 2L}, std::pair{2L, 3L}}) {
            auto q = q_make(t, m, ctx);
            const PadicNumber one = PadicNumber::one(ctx);
            const PadicNumber& qv = q.value();
            CAPTURE(p);
            CAPTURE(m);
            check_close(fermionic_integral(IntegrandSpec::constant(one), q, kTarget, default_depth(p)), one);
            for (long s : {1L, 2L, -1L}) {
                // sum (-q^{s+1})^y over an odd period, over [p^N]_{-q}
                PadicNumber expected = (one + qv) / (one + qv.pow(s + 1));
                check_close(fermionic_integral(IntegrandSpec::q_power(s), q, kTarget, default_depth(p)), expected);
            }
            PadicNumber e1 = -qv / (one + qv * qv);
            check_close(fermionic_integral(IntegrandSpec::bracket_monomial(PadicNumber::zero(ctx), 1), q, kTarget,
                                           default_depth(p)),
                        e1);
        }
    }
}

TEST_CASE("signed integral gives Euler polynomial values at 0") {
    auto ctx = PadicContext::create(5, 30);
    // E_n(0) for n = 0..5
    const std::vector<std::pair<long, long>> e0 = {{1, 1}, {-1, 2}, {0, 1}, {1, 4}, {0, 1}, {-1, 2}};
    for (long n = 0; n < 6; ++n) {
        auto r = fermionic_integral_signed(IntegrandSpec::bracket_monomial(PadicNumber::zero(ctx), n), ctx, kTarget,
                                           default_depth(5));
        CAPTURE(n);
        check_close(r, num(e0[n].first, e0[n].second, ctx));
    }
    // classical limit of a q-power is 1
    check_close(fermionic_integral_signed(IntegrandSpec::q_power(3), ctx, kTarget, default_depth(5)),
                PadicNumber::one(ctx));
}

TEST_CASE("tabulated integrand against the exact periodic sum") {
    std::mt19937_64 rng(7);
    for (long p : {3L, 5L}) {
        auto ctx = PadicContext::create(p, 30);
        const long level = 2;
        const long period = p * p;
        std::vector<PadicNumber> table;
        PadicNumber exact = PadicNumber::zero(ctx, 100);
        std::uniform_int_distribution<long> dist(-50, 50);
        for (long a = 0; a < period; ++a) {
            PadicNumber v = num(dist(rng), 1 + (a % 4), ctx);
            exact += a % 2 ? -v : v;
            table.push_back(v);
        }
        auto r = fermionic_integral_signed(IntegrandSpec::tabulated(table, level), ctx, kTarget, default_depth(p));
        check_close(r, exact);
        CHECK(code_of([&] {
                  fermionic_integral_signed(IntegrandSpec::tabulated({PadicNumber::one(ctx)}, 1), ctx, kTarget, 4);
              }) == ErrorCode::IntegrandDomainError);
    }
}

TEST_CASE("linearity") {
    auto ctx = PadicContext::create(3, 30);
    auto q = q_make(2, 2, ctx);
    std::mt19937_64 rng(11);
    std::vector<PadicNumber> f, g, h;
    for (long a = 0; a < 27; ++a) {
        f.push_back(padicq::testing::random_padic(rng, ctx, 1000));
        g.push_back(padicq::testing::random_padic(rng, ctx, 1000));
        h.push_back(f.back() * num(3, 1, ctx) + g.back());
    }
    auto if_ = fermionic_integral(IntegrandSpec::tabulated(f, 3), q, kTarget, 12);
    auto ig = fermionic_integral(IntegrandSpec::tabulated(g, 3), q, kTarget, 12);
    auto ih = fermionic_integral(IntegrandSpec::tabulated(h, 3), q, kTarget, 12);
    CHECK(agreement(ih.value, if_.value * num(3, 1, ctx) + ig.value) >= kTarget);
}

TEST_CASE("translation identity q I(f_1) + I(f) = [2]_q f(0)") {
    for (long p : {3L, 5L}) {
        auto ctx = PadicContext::create(p, 30);
        auto q = q_make(1, 2, ctx);
        const PadicNumber one = PadicNumber::one(ctx);
        const PadicNumber& qv = q.value();
        const PadicNumber c = num(1, p, ctx);
        struct Case {
            IntegrandSpec f;
            PadicNumber f0;
        };
        PadicNumber bc = q_bracket(c, q);
        std::vector<Case> cases = {
            {IntegrandSpec::constant(num(2, 7, ctx)), num(2, 7, ctx)},
            {IntegrandSpec::q_power(2), one},
            {IntegrandSpec::bracket_monomial(c, 3), bc.pow(3)},
            {IntegrandSpec::gamma_kernel(c), bc * (log_iwasawa(bc) - one)},
            {IntegrandSpec::bracket_monomial(c, 2).with_weight(), bc.pow(2)},
        };
        for (const auto& cs : cases) {
            auto i0 = fermionic_integral(cs.f, q, kTarget, default_depth(p));
            auto i1 = fermionic_integral(cs.f.translated(), q, kTarget, default_depth(p));
            CHECK(i0.converged);
            CHECK(i1.converged);
            CHECK(agreement(qv * i1.value + i0.value, (one + qv) * cs.f0) >= kTarget - 1);
        }
        // signed: I(f_1) + I(f) = 2 f(0) with the classical limit of the bracket
        auto s0 = fermionic_integral_signed(IntegrandSpec::bracket_monomial(c, 2), ctx, kTarget, default_depth(p));
        auto s1 = fermionic_integral_signed(IntegrandSpec::bracket_monomial(c, 2).translated(), ctx, kTarget,
                                            default_depth(p));
        CHECK(agreement(s0.value + s1.value, num(2, 1, ctx) * c * c) >= kTarget - 1);
    }
}

TEST_CASE("bosonic closed forms") {
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PadicContext::create(p, 30);
        auto q = q_make(1, 2, ctx);
        const PadicNumber one = PadicNumber::one(ctx);
        const PadicNumber& qv = q.value();
        CAPTURE(p);
        // q^{-y}: sum over the period is p^N, over [p^N]_q -> (q - 1)/log q
        check_close(bosonic_integral(IntegrandSpec::q_power(0).with_weight(), q, kTarget, default_depth(p)),
                    (qv - one) / q.log_q());
        // q^{jy}: (j+1)(q-1)/(q^{j+1}-1)
        for (long j : {0L, 1L, 3L}) {
            PadicNumber expected = PadicNumber::from_integer(j + 1, ctx) * (qv - one) / (qv.pow(j + 1) - one);
            check_close(bosonic_integral(IntegrandSpec::q_power(j), q, kTarget, default_depth(p)), expected);
        }
        auto moments = bracket_moments(MeasureKind::bosonic, PadicNumber::zero(ctx), 5, q, true, kTarget,
                                       default_depth(p));
        REQUIRE(moments.size() == 6);
        for (long n = 0; n <= 5; ++n) {
            CAPTURE(n);
            check_close(moments[static_cast<std::size_t>(n)], beta_closed_form(n, q));
        }
    }
}

TEST_CASE("moments match single integrals") {
    auto ctx = PadicContext::create(3, 30);
    auto q = q_make(2, 3, ctx);
    const PadicNumber c = num(2, 3, ctx);
    auto moments = bracket_moments(MeasureKind::fermionic, c, 4, q, false, kTarget, 12);
    for (long n = 0; n <= 4; ++n) {
        auto single = fermionic_integral(IntegrandSpec::bracket_monomial(c, n), q, kTarget, 12);
        CHECK(agreement(single.value, moments[static_cast<std::size_t>(n)].value) >= kTarget);
    }
}

TEST_CASE("domain errors") {
    auto ctx = PadicContext::create(3, 30);
    auto q = q_make(1, 1, ctx);
    // q^{1/9} needs v(x) + m >= 1
    CHECK(code_of([&] { fermionic_integral(IntegrandSpec::bracket_monomial(num(1, 9, ctx), 1), q, 8, 6); }) ==
          ErrorCode::IntegrandDomainError);
    // [c + y]_q hits p at y = -c mod p for integral c
    CHECK(code_of([&] { fermionic_integral(IntegrandSpec::gamma_kernel(num(1, 1, ctx)), q, 8, 6); }) ==
          ErrorCode::IntegrandDomainError);
    CHECK(code_of([&] { fermionic_integral(IntegrandSpec::q_power(0), q, 8, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("unconverged result is reported, not raised") {
    auto ctx = PadicContext::create(7, 30);
    auto r = fermionic_integral(IntegrandSpec::gamma_kernel(num(1, 7, ctx)), q_make(1, 2, ctx), 25, 3);
    CHECK_FALSE(r.converged);
    CHECK(r.depth_used == 3);
    CHECK(r.stability_valuation < 25);
}

TEST_CASE("worker count does not change the result") {
    auto ctx = PadicContext::create(3, 30);
    auto q = q_make(1, 2, ctx);
    auto f = IntegrandSpec::gamma_kernel(num(1, 3, ctx));
    IntegrationOptions one_worker;
    IntegrationOptions three_workers;
    three_workers.workers = 3;
    auto a = fermionic_integral(f, q, 40, 10, one_worker);
    auto b = fermionic_integral(f, q, 40, 10, three_workers);
    CHECK(a.value == b.value);
    CHECK(a.depth_used == b.depth_used);
    CHECK(a.stability_valuation == b.stability_valuation);
}

TEST_CASE("stability report") {
    auto ctx = PadicContext::create(5, 30);
    auto q = q_make(1, 2, ctx);
    auto rows = stability_report(IntegrandSpec::bracket_monomial(PadicNumber::zero(ctx), 2), q,
                                 MeasureKind::fermionic, 2, 6);
    REQUIRE(rows.size() == 5);
    CHECK(rows.front().depth == 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(rows[i].difference_valuation.has_value());
        // raw sums gain roughly a digit per depth
        if (i > 0) CHECK(*rows[i].difference_valuation >= *rows[i - 1].difference_valuation);
        CHECK(*rows[i].extrapolated_difference_valuation >= *rows[i].difference_valuation);
    }
    CHECK(code_of([&] {
              stability_report(IntegrandSpec::q_power(0), q, MeasureKind::fermionic, 4, 3);
          }) == ErrorCode::InvalidArgument);
}
