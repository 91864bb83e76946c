// One PASS/FAIL line per acceptance criterion.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "padicq/cli.hpp"
#include "padicq/euler_bernoulli.hpp"
#include "padicq/log_gamma.hpp"

using namespace padicq;

namespace {

const std::vector<long> primes = {3, 5, 7};
const std::vector<std::pair<long, long>> q_grid = {{1, 2}, {1, 3}, {2, 2}, {2, 3}};
constexpr int precision = 30;
constexpr long target = 12;

long budget_depth(long p) { return depth_for_budget(p, 1'000'000); }

struct Outcome {
    bool pass = true;
    std::string detail;
    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string point(long p, long t, long m, const std::string& rest = "") {
    return "p=" + std::to_string(p) + " q=" + std::to_string(t) + "," + std::to_string(m) + (rest.empty() ? "" : " " + rest);
}

Outcome criterion_1() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    long worst = 1 << 20;
    for (long p : primes) {
        auto ctx = PadicContext::create(p, precision);
        auto wide = ctx.with_precision(2 * precision + 64);
        for (auto [t, m] : q_grid) {
            auto q = q_make(t, m, ctx);
            for (long x : {0L, 1L, 2L}) {
                auto oracle = bracket_moments(MeasureKind::fermionic, PadicNumber::from_integer(x, wide), 8, q, false,
                                              target, budget_depth(p));
                for (long k = 0; k <= 8; ++k) {
                    long d = agreement(q_euler_polynomial(k, Rational(x), q), oracle[k].value);
                    worst = std::min(worst, d);
                    if (d < target || !oracle[k].converged)
                        o.fail(point(p, t, m, "x=" + std::to_string(x) + " m=" + std::to_string(k)) + " diff=" + std::to_string(d));
                }
            }
        }
    }
    const double secs = seconds_since(t0);
    if (secs > 60) o.fail("runtime " + std::to_string(secs) + "s > 60s");
    if (o.pass) o.detail = "min diff valuation " + std::to_string(worst) + ", " + std::to_string(static_cast<int>(secs)) + "s";
    return o;
}

Outcome criterion_2() {
    Outcome o;
    long worst = 1 << 20;
    for (long p : primes) {
        auto ctx = PadicContext::create(p, precision);
        for (auto [t, m] : q_grid) {
            auto q = q_make(t, m, ctx);
            for (long n = 0; n <= 10; ++n) {
                auto r = verify_translation_identity(n, q, target);
                worst = std::min(worst, r.diff_valuation);
                if (!r.passed()) o.fail(point(p, t, m, "n=" + std::to_string(n)));
            }
        }
    }
    if (o.pass) o.detail = "min diff valuation " + std::to_string(worst);
    return o;
}

Outcome criterion_3() {
    Outcome o;
    if (classical_euler(0) != Rational(1) || classical_euler(1) != Rational(-1, 2) || classical_euler(3) != Rational(1, 4))
        o.fail("regression values E0, E1, E3");
    long slack = 1 << 20;  // min over the grid of v - M
    for (long p : primes) {
        auto ctx = PadicContext::create(p, precision);
        for (long M = 3; M <= 8; ++M) {
            auto q = q_make(1, M, ctx);
            for (long n = 0; n <= 8; ++n) {
                long d = agreement(q_euler_number(n, q), PadicNumber::from_rational(classical_euler(n), ctx));
                slack = std::min(slack, d - M);
                if (d < M - 2) o.fail("p=" + std::to_string(p) + " M=" + std::to_string(M) + " n=" + std::to_string(n));
            }
        }
    }
    if (o.pass) o.detail = "min v_p(E_nq - E_n) - M = " + std::to_string(slack);
    return o;
}

Outcome criterion_4() {
    Outcome o;
    auto r = verify_log_series(200);
    if (!r.passed()) o.fail("coefficients differ from degree " + std::to_string(r.diff_valuation));
    if (r.extra["constant_term"] != "0") o.fail("constant term");
    if (r.extra["derivative_identity"] != "PASS") o.fail("derivative identity");
    if (o.pass) o.detail = "degree 200 exact";
    return o;
}

std::vector<Rational> gamma_xs(long p) { return {Rational(1, p), Rational(2, p), Rational(p + 1, p)}; }

Outcome criterion_5() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    long worst = 1 << 20;
    for (long p : primes) {
        auto ctx = PadicContext::create(p, precision);
        for (auto [t, m] : q_grid) {
            auto q = q_make(t, m, ctx);
            for (const auto& x : gamma_xs(p)) {
                auto r = verify_theorem_a(GammaArgument::make(x, q), q, target);
                worst = std::min(worst, r.diff_valuation);
                if (!r.passed()) o.fail(point(p, t, m, "x=" + x.to_string()) + " diff=" + std::to_string(r.diff_valuation));
            }
        }
    }
    const double secs = seconds_since(t0);
    if (secs > 300) o.fail("runtime " + std::to_string(secs) + "s > 300s");
    if (o.pass) o.detail = "min diff valuation " + std::to_string(worst) + ", " + std::to_string(static_cast<int>(secs)) + "s";
    return o;
}

Outcome criterion_6() {
    Outcome o;
    long worst = 1 << 20, worst_residual = 1 << 20;
    for (long p : primes) {
        auto ctx = PadicContext::create(p, precision);
        for (auto [t, m] : q_grid) {
            auto q = q_make(t, m, ctx);
            for (const auto& x : gamma_xs(p)) {
                auto arg = GammaArgument::make(x, q);
                for (auto ev : {GammaEvaluator::direct, GammaEvaluator::series}) {
                    auto r = verify_gamma_functional_equation(arg, q, target, ev);
                    worst = std::min(worst, r.diff_valuation);
                    if (!r.passed())
                        o.fail(point(p, t, m, "x=" + x.to_string()) + (ev == GammaEvaluator::direct ? " direct" : " series"));
                }
                auto printed = verify_gamma_functional_equation(arg, q, target, GammaEvaluator::series,
                                                                CoefficientVariant::as_printed);
                if (printed.verdict.has_value()) o.fail("as_printed report carries a verdict");
                if (!printed.extra.contains("residual_agreement")) {
                    o.fail(point(p, t, m, "x=" + x.to_string()) + " residual missing");
                    continue;
                }
                long ra = printed.extra["residual_agreement"].get<long>();
                worst_residual = std::min(worst_residual, ra);
                if (ra < target) o.fail(point(p, t, m, "x=" + x.to_string()) + " residual agreement " + std::to_string(ra));
            }
        }
    }
    if (o.pass)
        o.detail = "min diff valuation " + std::to_string(worst) + ", as_printed residual agreement " + std::to_string(worst_residual);
    return o;
}

Outcome criterion_7() {
    Outcome o;
    long worst0 = 1 << 20, slack1 = 1 << 20;
    for (long p : primes) {
        auto ctx = PadicContext::create(p, precision);
        const PadicNumber one = PadicNumber::one(ctx);
        try {
            for (auto [t, m] : q_grid) {
                auto q = q_make(t, m, ctx);
                auto b0 = q_bernoulli(0, q, target, budget_depth(p));
                long d = agreement(b0.value * q.log_q(), q.value() - one);
                worst0 = std::min(worst0, d);
                if (d < target) o.fail(point(p, t, m) + " beta0 diff " + std::to_string(d));
            }
            for (long M = 3; M <= 8; ++M) {
                auto q = q_make(1, M, ctx);
                auto b1 = q_bernoulli(1, q, target, budget_depth(p));
                long d = agreement(b1.value, PadicNumber::from_rational(-1, 2, ctx));
                slack1 = std::min(slack1, d - M);
                if (d < M - 2) o.fail("p=" + std::to_string(p) + " M=" + std::to_string(M) + " beta1 diff " + std::to_string(d));
            }
        } catch (const Error& e) {
            o.fail(std::string("p=") + std::to_string(p) + ": " + e.what());
        }
    }
    if (o.pass)
        o.detail = "min beta0 diff " + std::to_string(worst0) + ", min v(beta1 + 1/2) - M = " + std::to_string(slack1);
    return o;
}

Outcome criterion_8() {
    Outcome o;
    std::ostringstream diffs;
    for (long p : {3L, 5L}) {
        auto ctx = PadicContext::create(p, precision);
        for (auto [t, m] : q_grid) {
            auto q = q_make(t, m, ctx);
            for (const auto& x : {Rational(1, p), Rational(2, p)}) {
                auto r = t_gamma_series_conjecture(GammaArgument::make(x, q), q, target);
                const std::string where = point(p, t, m, "x=" + x.to_string());
                if (r.verdict.has_value()) o.fail(where + " carries a verdict");
                if (r.extra.contains("error")) {
                    o.fail(where + " " + r.extra["error"].get<std::string>());
                    continue;
                }
                for (const char* key : {"direct_stability", "series_stability", "diff_valuation_next_depth"}) {
                    if (!r.extra.contains(key)) o.fail(where + " missing " + key);
                }
                if (r.lhs.empty() || r.rhs.empty()) o.fail(where + " missing sides");
                if (r.extra["direct_stability"].get<long>() < 10) o.fail(where + " direct side below 10 digits");
                if (r.extra["series_stability"].get<long>() < 10) o.fail(where + " series side below 10 digits");
                long next = r.extra["diff_valuation_next_depth"].get<long>();
                if (std::abs(next - r.diff_valuation) > 1)
                    o.fail(where + " diff " + std::to_string(r.diff_valuation) + " -> " + std::to_string(next));
                diffs << r.diff_valuation << "/" << next << " ";
            }
        }
    }
    if (o.pass) o.detail = "diff valuation (depth N / N+1): " + diffs.str();
    return o;
}

PadicNumber random_element(std::mt19937_64& rng, const PadicContext& ctx) {
    std::uniform_int_distribution<long> num(-1'000'000, 1'000'000);
    std::uniform_int_distribution<long> den(1, 1'000'000);
    long a = 0;
    while (a == 0) a = num(rng);
    return PadicNumber::from_rational(a, den(rng), ctx);
}

bool consistent(const PadicNumber& a, const PadicNumber& b) {
    return agreement(a, b) >= std::min(a.absolute_precision(), b.absolute_precision());
}

std::string cli_output(const std::vector<std::string>& args, int& code) {
    std::ostringstream out, err;
    code = run_cli(args, out, err);
    return out.str();
}

Outcome criterion_9() {
    Outcome o;
    long violations = 0;
    for (long p : primes) {
        auto ctx = PadicContext::create(p, precision);
        std::mt19937_64 rng(static_cast<unsigned long>(p));
        const PadicNumber zero = PadicNumber::zero(ctx);
        const PadicNumber one = PadicNumber::one(ctx);
        for (int i = 0; i < 10'000; ++i) {
            auto a = random_element(rng, ctx), b = random_element(rng, ctx), c = random_element(rng, ctx);
            bool ok = consistent(a + b, b + a) && consistent(a * b, b * a) && consistent((a + b) + c, a + (b + c)) &&
                      consistent((a * b) * c, a * (b * c)) && consistent(a * (b + c), a * b + a * c) &&
                      consistent(a + zero, a) && consistent(a * one, a) && consistent(a + (-a), zero) &&
                      consistent(a * (one / a), one) && consistent((a - b) + b, a) && consistent((a / b) * b, a);
            if (!ok) ++violations;
        }
        // exp/log round trip on p Z_p and the 1-units, Iwasawa additivity on Q_p^*
        for (int i = 0; i < 1'000; ++i) {
            auto a = random_element(rng, ctx);
            auto b = random_element(rng, ctx);
            PadicNumber small = PadicNumber::from_integer(p, ctx) * (a.valuation() >= 0 ? a : a.pow(-1));
            if (small.is_zero() || small.valuation() < 1) small = PadicNumber::from_integer(p, ctx);
            if (!consistent(log_classical(exp_p(small)), small)) ++violations;
            auto unit1 = one + small;
            if (!consistent(exp_p(log_classical(unit1)), unit1)) ++violations;
            if (!consistent(log_iwasawa(a * b), log_iwasawa(a) + log_iwasawa(b))) ++violations;
        }
        if (!log_iwasawa(PadicNumber::from_integer(p, ctx)).is_zero()) ++violations;
    }
    if (violations) o.fail(std::to_string(violations) + " axiom or round-trip violations");

    int c1 = 0, c2 = 0, c3 = 0;
    const std::string first = cli_output({"verify", "--suite", "all", "--format", "json"}, c1);
    const std::string second = cli_output({"verify", "--suite", "all", "--format", "json"}, c2);
    const std::string threaded = cli_output({"verify", "--suite", "all", "--format", "json", "--workers", "3"}, c3);
    if (first.empty()) o.fail("verify --suite all produced no output");
    if (first != second) o.fail("verify --suite all differs between runs");
    if (first != threaded) o.fail("verify --suite all differs between worker counts");
    if (c1 != exit_pass || c2 != c1 || c3 != c1) o.fail("verify --suite all exit codes " + std::to_string(c1) + "," +
                                                         std::to_string(c2) + "," + std::to_string(c3));
    if (o.pass) o.detail = "3x10^4 triples, 0 violations; verify --suite all byte-identical (" + std::to_string(first.size()) + " bytes)";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 q-Euler closed form vs fermionic oracle", criterion_1},
        {"2 translation identity", criterion_2},
        {"3 classical limits of q-Euler numbers", criterion_3},
        {"4 formal series for (1+x)log(1+x)", criterion_4},
        {"5 log-gamma series vs direct integral", criterion_5},
        {"6 functional equation, both evaluators", criterion_6},
        {"7 q-Bernoulli beta_0 and beta_1", criterion_7},
        {"8 T-series comparison report", criterion_8},
        {"9 infrastructure properties", criterion_9},
    };
    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failures;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ": " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
