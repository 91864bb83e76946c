#include <doctest.h>

#include "padicq/qanalog.hpp"
#include "test_support.hpp"

using namespace padicq;
using padicq::testing::code_of;
using padicq::testing::consistent;

TEST_CASE("q parameter validation") {
    auto ctx = PadicContext::create(5, 30);
    CHECK(code_of([&] { q_make(1, 0, ctx); }) == ErrorCode::DepthTooSmall);
    CHECK(code_of([&] { q_make(10, 2, ctx); }) == ErrorCode::UnitPartDivisible);
    auto q = q_make(-3, 2, ctx);
    CHECK(q.exact() == Rational(1 - 3 * 25));
    CHECK(q.one_unit_depth() == 2);
    CHECK(q.log_q().valuation() == 2);
    auto other = PadicContext::create(5, 50);
    CHECK(q.in(other).value() == PadicNumber::from_rational(q.exact(), other));
}

TEST_CASE("q^x on integers is the exact power") {
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PadicContext::create(p, 30);
        for (long m : {1L, 2L, 4L}) {
            auto q = q_make(2, m, ctx);
            for (long n : {-3L, 0L, 1L, 2L, 17L}) {
                CAPTURE(p);
                CAPTURE(n);
                CHECK(consistent(q_pow(q, PadicNumber::from_integer(n, ctx)), q.value().pow(n)));
            }
        }
    }
}

TEST_CASE("q^x domain") {
    auto ctx = PadicContext::create(3, 30);
    auto q = q_make(1, 2, ctx);
    CHECK(code_of([&] { q_pow(q, PadicNumber::from_rational(1, 27, ctx)); }) == ErrorCode::ExponentOutOfDomain);
    // (q^{1/3})^3 = q
    auto root = q_pow(q, PadicNumber::from_rational(1, 3, ctx));
    CHECK(agreement(root.pow(3), q.value()) >= 28);
}

TEST_CASE("brackets") {
    auto ctx = PadicContext::create(7, 30);
    auto q = q_make(3, 1, ctx);
    const PadicNumber one = PadicNumber::one(ctx);
    // [n]_q = 1 + q + ... + q^{n-1}
    PadicNumber sum = PadicNumber::zero(ctx);
    for (long n = 1; n <= 6; ++n) {
        sum += q.value().pow(n - 1);
        CHECK(consistent(q_bracket(PadicNumber::from_integer(n, ctx), q), sum));
    }
    // [n]_{-q} = sum (-q)^i
    PadicNumber alt = PadicNumber::zero(ctx);
    for (long n = 1; n <= 6; ++n) {
        alt += (-q.value()).pow(n - 1);
        CHECK(consistent(q_bracket_neg(n, q), alt));
    }
    CHECK(q_bracket_neg(0, q).is_zero());
    CHECK(code_of([&] { q_bracket_neg(-1, q); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("[x]_q tends to x as q tends to 1") {
    // [x]_q - x = sum_{k>=2} C(x,k) (q-1)^{k-1}: valuation >= m + v(x) on Z_p;
    // off Z_p the k = 2 term dominates and the floor drops to m + 2 v(x).
    for (long p : {3L, 5L, 7L}) {
        auto ctx = PadicContext::create(p, 40);
        const std::vector<Rational> xs = {Rational(2), Rational(p), Rational(p * p + 1), Rational(1, 2),
                                          Rational(3 * p, 7), Rational(1, p), Rational(2, p), Rational(p + 1, p),
                                          Rational(1, p * p)};
        for (long m = 1; m <= 8; ++m) {
            auto q = q_make(1, m, ctx);
            for (const auto& x : xs) {
                auto X = PadicNumber::from_rational(x, ctx);
                const long v = X.valuation();
                if (v + m < 1) continue;
                auto wide = ctx.with_precision(40 + m);
                long d = agreement(q_bracket(PadicNumber::from_rational(x, wide), q.in(wide)), X.rebased(wide));
                CAPTURE(p);
                CAPTURE(m);
                CAPTURE(x.to_string());
                CHECK(d >= (v >= 0 ? m + v : m + 2 * v));
            }
        }
    }
}

TEST_CASE("context mismatch") {
    auto q = q_make(1, 1, PadicContext::create(3, 20));
    auto x = PadicNumber::from_integer(2, PadicContext::create(5, 20));
    CHECK(code_of([&] { q_bracket(x, q); }) == ErrorCode::ContextMismatch);
}
