#include "padicq/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "padicq/euler_bernoulli.hpp"
#include "padicq/log_gamma.hpp"

namespace padicq {

namespace {

using json = nlohmann::ordered_json;

constexpr long max_budget = 10'000'000;
constexpr long default_budget = 1'000'000;

struct QSpec {
    mpz_class t;
    long m = 0;
    std::string label;
};

struct RunConfig {
    std::string command;
    std::vector<long> primes;
    bool primes_given = false;
    int precision = 30;
    std::vector<QSpec> qs;
    std::vector<Rational> xs;
    bool xs_given = false;
    std::optional<long> n;
    long K = max_series_degree;
    long target = 12;
    std::optional<long> max_sum_exponent;
    bool strict = false;
    std::string format;
    std::string out;
    int workers = 1;
    std::string quantity;
    std::string suite;
    std::string kind;
    long samples = 100;
    unsigned long seed = 1;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

QSpec parse_q(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw ConfigError("--q expects t,m but got '" + text + "'");
    try {
        Rational t = Rational::parse(text.substr(0, comma));
        Rational m = Rational::parse(text.substr(comma + 1));
        if (!t.is_integer() || !m.is_integer() || !m.numerator().fits_slong_p())
            throw ConfigError("--q expects integers t,m but got '" + text + "'");
        return {t.numerator(), m.numerator().get_si(), t.to_string() + "," + m.to_string()};
    } catch (const Error& e) {
        throw ConfigError("--q '" + text + "': " + e.what());
    }
}

std::vector<QSpec> default_qs() {
    std::vector<QSpec> qs;
    for (long t : {1L, 2L}) {
        for (long m : {2L, 3L}) qs.push_back({t, m, std::to_string(t) + "," + std::to_string(m)});
    }
    return qs;
}

std::vector<Rational> gamma_xs(const RunConfig& c, long p) {
    if (c.xs_given) return c.xs;
    return {Rational(1, p), Rational(2, p), Rational(p + 1, p)};
}

long depth_for(const RunConfig& c, long p) {
    return c.max_sum_exponent ? *c.max_sum_exponent : depth_for_budget(p, default_budget);
}

std::string q_text(const QParam& q) {
    return q.unit_coefficient().get_str() + "," + std::to_string(q.one_unit_depth());
}

// Re-validates every component precondition before anything runs.
void validate(RunConfig& c) {
    if (c.primes.empty()) c.primes = {3, 5, 7};
    if (c.qs.empty()) c.qs = default_qs();
    if (c.precision < 1) throw ConfigError("--precision must be >= 1");
    if (c.target < 1) throw ConfigError("--target must be >= 1");
    if (c.workers < 1) throw ConfigError("--workers must be >= 1");
    if (c.n && *c.n < 0) throw ConfigError("--n must be >= 0");
    for (long p : c.primes) {
        try {
            auto ctx = PadicContext::create(p, c.precision);
            for (const auto& qs : c.qs) q_make(qs.t, qs.m, ctx);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        if (c.max_sum_exponent) {
            if (*c.max_sum_exponent < 1) throw ConfigError("--max-sum-exponent must be >= 1");
            if (*c.max_sum_exponent > depth_for_budget(p, max_budget))
                throw ConfigError("p^" + std::to_string(*c.max_sum_exponent) + " exceeds the 10^7 summand budget for p=" +
                                  std::to_string(p));
        }
    }
}

// ---------------------------------------------------------------------------
// Worker pool; results come back in task order.

template <class T>
std::vector<T> run_tasks(const std::vector<std::function<T()>>& tasks, int workers) {
    std::vector<T> results(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= tasks.size()) return;
            try {
                results[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    std::vector<std::thread> threads;
    for (int i = 1; i < n; ++i) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

using Reports = std::vector<AuditReport>;
using Task = std::function<Reports()>;

AuditReport failed_report(std::string identity, json params, long target, const Error& e) {
    AuditReport r;
    r.identity = std::move(identity);
    r.params = std::move(params);
    r.target = target;
    r.verdict = false;
    r.extra["error_code"] = error_code_name(e.code());
    r.extra["error"] = e.what();
    return r;
}

json base_params(const QParam& q) {
    return {{"p", q.context().prime()}, {"precision", q.context().precision()}, {"q", q_text(q)}};
}

// ---------------------------------------------------------------------------
// verify suites

void add_eq3(const RunConfig& c, std::vector<Task>& tasks) {
    const long max_m = c.n.value_or(8);
    for (long p : c.primes) {
        for (const auto& qs : c.qs) {
            std::vector<Rational> xs = c.xs_given ? c.xs : std::vector<Rational>{0, 1, 2};
            for (const auto& x : xs) {
                tasks.push_back([=, &c] {
                    auto ctx = PadicContext::create(p, c.precision);
                    auto q = q_make(qs.t, qs.m, ctx);
                    Reports out;
                    const PadicNumber xw = PadicNumber::from_rational(x, ctx.with_precision(2 * c.precision + 64));
                    auto oracle = bracket_moments(MeasureKind::fermionic, xw, max_m, q, false, c.target, depth_for(c, p));
                    for (long m = 0; m <= max_m; ++m) {
                        json params = base_params(q);
                        params["x"] = x.to_string();
                        params["m"] = m;
                        const auto& o = oracle[static_cast<std::size_t>(m)];
                        PadicNumber closed = q_euler_polynomial(m, x, q);
                        AuditReport r;
                        r.identity = "eq3";
                        r.params = params;
                        r.lhs = render(closed);
                        r.rhs = render(o.value);
                        r.diff_valuation = agreement(closed, o.value);
                        r.target = c.target;
                        r.verdict = r.diff_valuation >= c.target && o.converged;
                        r.extra["depth_used"] = o.depth_used;
                        r.extra["stability_valuation"] = o.stability_valuation;
                        if (!o.converged) r.extra["error_code"] = "NotStabilized";
                        out.push_back(std::move(r));
                    }
                    return out;
                });
            }
        }
    }
}

void add_eq6(const RunConfig& c, std::vector<Task>& tasks) {
    tasks.push_back([K = c.K] { return Reports{verify_log_series(K)}; });
}

void add_eq8(const RunConfig& c, std::vector<Task>& tasks) {
    const long max_n = c.n.value_or(10);
    for (long p : c.primes) {
        for (const auto& qs : c.qs) {
            tasks.push_back([=, &c] {
                auto ctx = PadicContext::create(p, c.precision);
                auto q = q_make(qs.t, qs.m, ctx);
                Reports out;
                for (long n = 0; n <= max_n; ++n) out.push_back(verify_translation_identity(n, q, c.target));
                return out;
            });
        }
    }
}

void add_eq9(const RunConfig& c, std::vector<Task>& tasks) {
    for (long p : c.primes) {
        for (const auto& qs : c.qs) {
            tasks.push_back([=, &c] {
                auto ctx = PadicContext::create(p, c.precision);
                auto q = q_make(qs.t, qs.m, ctx);
                // seeded per grid point so the pairs do not depend on scheduling
                std::mt19937_64 rng(c.seed * 1'000'003ULL + static_cast<unsigned long>(p) * 1009ULL +
                                    qs.t.get_ui() * 31ULL + static_cast<unsigned long>(qs.m));
                std::uniform_int_distribution<long> num(-100000, 100000);
                std::uniform_int_distribution<long> den(1, 1000);
                // v_p(x) >= 1 - m keeps q^x defined
                mpz_class x_den = ctx.power(qs.m - 1);
                Reports out;
                auto unit_den = [&] {
                    long d = den(rng);
                    while (d % p == 0) ++d;
                    return d;
                };
                for (long i = 0; i < c.samples; ++i) {
                    auto x = PadicNumber::from_rational(num(rng), x_den * unit_den(), ctx);
                    auto z = PadicNumber::from_rational(num(rng), unit_den(), ctx);
                    auto r = verify_bracket_addition(x, z, q, c.target);
                    r.params["sample"] = i;
                    out.push_back(std::move(r));
                }
                return out;
            });
        }
    }
}

template <class Fn>
void for_gamma_grid(const RunConfig& c, std::vector<Task>& tasks, const std::string& identity, Fn fn) {
    for (long p : c.primes) {
        for (const auto& qs : c.qs) {
            for (const auto& x : gamma_xs(c, p)) {
                tasks.push_back([=, &c] {
                    auto ctx = PadicContext::create(p, c.precision);
                    auto q = q_make(qs.t, qs.m, ctx);
                    try {
                        return fn(GammaArgument::make(x, q), q);
                    } catch (const Error& e) {
                        json params = base_params(q);
                        params["x"] = x.to_string();
                        return Reports{failed_report(identity, params, c.target, e)};
                    }
                });
            }
        }
    }
}

GammaAuditOptions audit_options(const RunConfig& c, long p) {
    GammaAuditOptions o;
    o.max_depth = depth_for(c, p);
    return o;
}

void add_eq10(const RunConfig& c, std::vector<Task>& tasks) {
    for_gamma_grid(c, tasks, "eq10", [&c](const GammaArgument& x, const QParam& q) {
        const long p = q.context().prime();
        Reports out;
        for (long z : {0L, 1L, 2L, p, p * p + 1}) out.push_back(verify_decomposition(x, z, q, c.target));
        return out;
    });
}

void add_eq12(const RunConfig& c, std::vector<Task>& tasks) {
    for_gamma_grid(c, tasks, "eq12", [&c](const GammaArgument& x, const QParam& q) {
        auto o = audit_options(c, q.context().prime());
        return Reports{
            verify_gamma_functional_equation(x, q, c.target, GammaEvaluator::direct,
                                             CoefficientVariant::derived_coefficient, o),
            verify_gamma_functional_equation(x, q, c.target, GammaEvaluator::series,
                                             CoefficientVariant::derived_coefficient, o),
            verify_gamma_functional_equation(x, q, c.target, GammaEvaluator::series, CoefficientVariant::as_printed,
                                             o),
        };
    });
}

void add_thm_a(const RunConfig& c, std::vector<Task>& tasks) {
    for_gamma_grid(c, tasks, "thmA", [&c](const GammaArgument& x, const QParam& q) {
        return Reports{verify_theorem_a(x, q, c.target, audit_options(c, q.context().prime()))};
    });
}

void add_limits(const RunConfig& c, std::vector<Task>& tasks) {
    const long max_n = c.n.value_or(8);
    for (long p : c.primes) {
        for (long M = 3; M <= 8; ++M) {
            tasks.push_back([=, &c] {
                auto ctx = PadicContext::create(p, c.precision);
                auto q = q_make(1, M, ctx);
                Reports out;
                for (long n = 0; n <= max_n; ++n) {
                    PadicNumber e = q_euler_number(n, q);
                    PadicNumber classical = PadicNumber::from_rational(classical_euler(n), ctx);
                    AuditReport r;
                    r.identity = "limit-euler";
                    r.params = base_params(q);
                    r.params["n"] = n;
                    r.lhs = render(e);
                    r.rhs = classical_euler(n).to_string();
                    r.diff_valuation = agreement(e, classical);
                    r.target = M - 2;
                    r.verdict = r.diff_valuation >= r.target;
                    out.push_back(std::move(r));
                }
                json params = base_params(q);
                try {
                    auto b1 = q_bernoulli(1, q, c.target, depth_for(c, p));
                    PadicNumber half = PadicNumber::from_rational(-1, 2, ctx);
                    AuditReport r;
                    r.identity = "limit-beta1";
                    r.params = params;
                    r.lhs = render(b1.value);
                    r.rhs = "-1/2";
                    r.diff_valuation = agreement(b1.value, half);
                    r.target = M - 2;
                    r.verdict = r.diff_valuation >= r.target;
                    r.extra["stability_valuation"] = b1.stability_valuation;
                    out.push_back(std::move(r));
                } catch (const Error& e) {
                    out.push_back(failed_report("limit-beta1", params, M - 2, e));
                }
                return out;
            });
        }
        for (const auto& qs : c.qs) {
            tasks.push_back([=, &c] {
                auto ctx = PadicContext::create(p, c.precision);
                auto q = q_make(qs.t, qs.m, ctx);
                try {
                    auto b0 = q_bernoulli(0, q, c.target, depth_for(c, p));
                    PadicNumber lhs = b0.value * q.log_q();
                    PadicNumber rhs = q.value() - PadicNumber::one(ctx);
                    AuditReport r;
                    r.identity = "beta0";
                    r.params = base_params(q);
                    r.lhs = render(lhs);
                    r.rhs = render(rhs);
                    r.diff_valuation = agreement(lhs, rhs);
                    r.target = c.target;
                    r.verdict = r.diff_valuation >= c.target;
                    r.extra["stability_valuation"] = b0.stability_valuation;
                    return Reports{r};
                } catch (const Error& e) {
                    return Reports{failed_report("beta0", base_params(q), c.target, e)};
                }
            });
        }
    }
}

const std::vector<std::string> suite_names = {"eq3", "eq6", "eq8", "eq9", "eq10", "eq12", "thmA", "limits"};

void add_suite(const RunConfig& c, const std::string& suite, std::vector<Task>& tasks) {
    if (suite == "eq3") return add_eq3(c, tasks);
    if (suite == "eq6") return add_eq6(c, tasks);
    if (suite == "eq8") return add_eq8(c, tasks);
    if (suite == "eq9") return add_eq9(c, tasks);
    if (suite == "eq10") return add_eq10(c, tasks);
    if (suite == "eq12") return add_eq12(c, tasks);
    if (suite == "thmA") return add_thm_a(c, tasks);
    if (suite == "limits") return add_limits(c, tasks);
    if (suite == "all") {
        for (const auto& s : suite_names) add_suite(c, s, tasks);
        return;
    }
    throw ConfigError("unknown suite '" + suite + "'");
}

// ---------------------------------------------------------------------------
// output

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char ch : s) {
        if (ch == '"') r += '"';
        r += ch;
    }
    return r + "\"";
}

std::string params_text(const json& params) {
    std::string s;
    for (const auto& [k, v] : params.items()) {
        if (!s.empty()) s += ' ';
        s += k + "=" + (v.is_string() ? v.get<std::string>() : v.dump());
    }
    return s;
}

std::string verdict_text(const AuditReport& r) {
    if (!r.verdict) return "REPORT";
    return *r.verdict ? "PASS" : "FAIL";
}

std::string format_reports(const Reports& reports, const std::string& format, const std::string& label) {
    std::ostringstream out;
    long passed = 0, failed = 0, report_only = 0;
    for (const auto& r : reports) {
        if (!r.verdict) ++report_only;
        else if (*r.verdict) ++passed;
        else ++failed;
    }
    if (format == "json") {
        json doc;
        doc["suite"] = label;
        doc["reports"] = json::array();
        for (const auto& r : reports) doc["reports"].push_back(r.to_json());
        doc["summary"] = {{"total", reports.size()}, {"passed", passed}, {"failed", failed}, {"report_only", report_only}};
        out << doc.dump(2) << "\n";
    } else if (format == "csv") {
        out << "identity,params,lhs,rhs,diff_valuation,target,verdict\n";
        for (const auto& r : reports) {
            out << csv_field(r.identity) << ',' << csv_field(params_text(r.params)) << ',' << csv_field(r.lhs) << ','
                << csv_field(r.rhs) << ',' << r.diff_valuation << ',' << r.target << ','
                << (r.verdict ? verdict_text(r) : "") << "\n";
        }
    } else {
        for (const auto& r : reports) {
            out << verdict_text(r) << ' ' << r.identity << ' ' << params_text(r.params) << " diff=" << r.diff_valuation
                << " target=" << r.target;
            if (r.extra.contains("error")) out << " error=" << r.extra["error"].get<std::string>();
            out << "\n";
        }
        out << "total=" << reports.size() << " passed=" << passed << " failed=" << failed
            << " report_only=" << report_only << "\n";
    }
    return out.str();
}

// Writes the body to --out or stdout; false on I/O failure.
bool emit(const RunConfig& c, const std::string& body, std::ostream& out, std::ostream& err) {
    if (c.out.empty() || c.out == "-") {
        out << body;
        return true;
    }
    std::ofstream file(c.out, std::ios::binary);
    if (!file) {
        err << "error: cannot open '" << c.out << "' for writing\n";
        return false;
    }
    file << body;
    file.close();
    if (!file) {
        err << "error: failed writing '" << c.out << "'\n";
        return false;
    }
    return true;
}

int verify_exit(const Reports& reports, bool strict) {
    bool failed = false, unstable = false;
    for (const auto& r : reports) {
        if (!r.gating() || r.passed()) continue;
        failed = true;
        if (r.extra.contains("error_code") && r.extra["error_code"] == "NotStabilized") unstable = true;
    }
    if (strict && unstable) return exit_not_stabilized;
    return failed ? exit_audit_fail : exit_pass;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::vector<Task> tasks;
    add_suite(c, c.suite, tasks);
    Reports all;
    for (auto& chunk : run_tasks(tasks, c.workers)) {
        for (auto& r : chunk) all.push_back(std::move(r));
    }
    if (!emit(c, format_reports(all, c.format.empty() ? "json" : c.format, c.suite), out, err)) return exit_io;
    return verify_exit(all, c.strict);
}

// ---------------------------------------------------------------------------
// eval

struct EvalRow {
    json params = json::object();
    std::string value;
    std::optional<bool> converged;
    long stability = 0;
    long depth = 0;
};

int cmd_eval(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const std::string& qty = c.quantity;
    std::vector<std::function<std::vector<EvalRow>()>> tasks;

    if (qty == "classical-euler" || qty == "classical-bernoulli") {
        if (!c.n) throw ConfigError("--n is required for " + qty);
        Rational v;
        try {
            v = qty == "classical-euler" ? classical_euler(*c.n) : classical_bernoulli(*c.n);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        tasks.push_back([v, n = *c.n] { return std::vector<EvalRow>{{json{{"n", n}}, v.to_string(), std::nullopt, 0, 0}}; });
    } else if (qty == "q-euler" || qty == "q-bernoulli" || qty == "gamma" || qty == "t-gamma" || qty == "bracket") {
        if ((qty == "q-euler" || qty == "q-bernoulli") && !c.n) throw ConfigError("--n is required for " + qty);
        if (qty == "bracket" && !c.xs_given) throw ConfigError("--x is required for bracket");
        for (long p : c.primes) {
            for (const auto& qs : c.qs) {
                std::vector<Rational> xs;
                if (qty == "gamma" || qty == "t-gamma") xs = gamma_xs(c, p);
                else if (qty == "q-bernoulli") xs = {Rational(0)};
                else xs = c.xs_given ? c.xs : std::vector<Rational>{0};
                for (const auto& x : xs) {
                    tasks.push_back([=, &c]() -> std::vector<EvalRow> {
                        auto ctx = PadicContext::create(p, c.precision);
                        auto q = q_make(qs.t, qs.m, ctx);
                        EvalRow row;
                        row.params = base_params(q);
                        if (qty != "q-bernoulli") row.params["x"] = x.to_string();
                        if (c.n) row.params["n"] = *c.n;
                        const long depth = depth_for(c, p);
                        const PadicContext wide = ctx.with_precision(2 * c.precision + 64);
                        if (qty == "q-euler") {
                            row.value = render(q_euler_polynomial(*c.n, x, q));
                        } else if (qty == "bracket") {
                            row.value = render(q_bracket(PadicNumber::from_rational(x, wide), q.in(wide)).rebased(ctx));
                        } else if (qty == "q-bernoulli") {
                            auto r = bosonic_integral(IntegrandSpec::bracket_monomial(PadicNumber::zero(ctx), *c.n).with_weight(),
                                                      q, c.target, depth);
                            row.value = render(r.value);
                            row.converged = r.converged;
                            row.stability = r.stability_valuation;
                            row.depth = r.depth_used;
                        } else {
                            auto arg = GammaArgument::make(x, q);
                            IntegralResult r{PadicNumber::zero(ctx), 0, 0, false};
                            if (qty == "gamma") {
                                r = fermionic_integral(IntegrandSpec::gamma_kernel(arg.in(wide)), q, c.target, depth);
                            } else {
                                r = bosonic_integral(IntegrandSpec::gamma_kernel(arg.in(wide)).with_weight(), q, c.target, depth);
                                r.value = q_pow(q.in(wide), -arg.in(wide)).rebased(ctx) * r.value;
                            }
                            row.value = render(r.value);
                            row.converged = r.converged;
                            row.stability = r.stability_valuation;
                            row.depth = r.depth_used;
                        }
                        return {row};
                    });
                }
            }
        }
    } else {
        throw ConfigError("unknown quantity '" + qty + "'");
    }

    std::vector<EvalRow> rows;
    try {
        for (auto& chunk : run_tasks(tasks, c.workers)) {
            for (auto& r : chunk) rows.push_back(std::move(r));
        }
    } catch (const Error& e) {
        // domain problems in a grid point are configuration errors
        throw ConfigError(e.what());
    }

    bool unstable = false;
    for (const auto& r : rows) {
        if (r.converged && !*r.converged) {
            unstable = true;
            err << "warning: " << params_text(r.params) << " stable only to " << r.stability << " digits\n";
        }
    }
    if (unstable && c.strict) return exit_not_stabilized;

    std::ostringstream body;
    const std::string format = c.format.empty() ? "text" : c.format;
    if (format == "json") {
        json doc = json::array();
        for (const auto& r : rows) {
            json j;
            j["quantity"] = qty;
            j["params"] = r.params;
            j["value"] = r.value;
            if (r.converged) {
                j["converged"] = *r.converged;
                j["stability_valuation"] = r.stability;
                j["depth_used"] = r.depth;
            }
            doc.push_back(j);
        }
        body << doc.dump(2) << "\n";
    } else if (format == "csv") {
        body << "quantity,params,value\n";
        for (const auto& r : rows) body << qty << ',' << csv_field(params_text(r.params)) << ',' << csv_field(r.value) << "\n";
    } else if (rows.size() == 1) {
        body << rows.front().value << "\n";
    } else {
        for (const auto& r : rows) body << params_text(r.params) << ": " << r.value << "\n";
    }
    return emit(c, body.str(), out, err) ? exit_pass : exit_io;
}

// ---------------------------------------------------------------------------
// report

int report_stability(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const std::string& qty = c.quantity.empty() ? std::string("gamma") : c.quantity;
    if (qty != "gamma" && qty != "t-gamma" && qty != "q-euler" && qty != "q-bernoulli")
        throw ConfigError("stability tables exist for gamma, t-gamma, q-euler and q-bernoulli");
    std::vector<std::function<json()>> tasks;
    for (long p : c.primes) {
        for (const auto& qs : c.qs) {
            std::vector<Rational> xs;
            if (qty == "gamma" || qty == "t-gamma") xs = gamma_xs(c, p);
            else if (qty == "q-bernoulli") xs = {Rational(0)};
            else xs = c.xs_given ? c.xs : std::vector<Rational>{0};
            for (const auto& x : xs) {
                tasks.push_back([=, &c] {
                    auto ctx = PadicContext::create(p, c.precision);
                    auto q = q_make(qs.t, qs.m, ctx);
                    const PadicContext wide = ctx.with_precision(2 * c.precision + 64);
                    const long n = c.n.value_or(1);
                    IntegrandSpec f;
                    MeasureKind kind = MeasureKind::fermionic;
                    if (qty == "gamma") {
                        f = IntegrandSpec::gamma_kernel(GammaArgument::make(x, q).in(wide));
                    } else if (qty == "t-gamma") {
                        f = IntegrandSpec::gamma_kernel(GammaArgument::make(x, q).in(wide)).with_weight();
                        kind = MeasureKind::bosonic;
                    } else if (qty == "q-euler") {
                        f = IntegrandSpec::bracket_monomial(PadicNumber::from_rational(x, wide), n);
                    } else {
                        f = IntegrandSpec::bracket_monomial(PadicNumber::zero(wide), n).with_weight();
                        kind = MeasureKind::bosonic;
                    }
                    json params = base_params(q);
                    if (qty != "q-bernoulli") params["x"] = x.to_string();
                    if (qty == "q-euler" || qty == "q-bernoulli") params["n"] = n;
                    json rows = json::array();
                    for (const auto& row : stability_report(f, q, kind, 1, depth_for(c, p))) {
                        json r;
                        r["depth"] = row.depth;
                        r["partial_sum"] = render(row.partial_sum);
                        r["difference_valuation"] = row.difference_valuation ? json(*row.difference_valuation) : json(nullptr);
                        r["extrapolated"] = render(row.extrapolated);
                        r["extrapolated_difference_valuation"] =
                            row.extrapolated_difference_valuation ? json(*row.extrapolated_difference_valuation) : json(nullptr);
                        rows.push_back(r);
                    }
                    return json{{"quantity", qty}, {"params", params}, {"rows", rows}};
                });
            }
        }
    }
    std::vector<json> tables;
    try {
        tables = run_tasks(tasks, c.workers);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    std::ostringstream body;
    const std::string format = c.format.empty() ? "csv" : c.format;
    if (format == "json") {
        body << json(tables).dump(2) << "\n";
    } else {
        body << "quantity,params,N,difference_valuation,extrapolated_difference_valuation,partial_sum,extrapolated\n";
        for (const auto& t : tables) {
            for (const auto& r : t["rows"]) {
                auto val = [](const json& v) { return v.is_null() ? std::string() : v.dump(); };
                body << t["quantity"].get<std::string>() << ',' << csv_field(params_text(t["params"])) << ','
                     << r["depth"].dump() << ',' << val(r["difference_valuation"]) << ','
                     << val(r["extrapolated_difference_valuation"]) << ',' << csv_field(r["partial_sum"].get<std::string>())
                     << ',' << csv_field(r["extrapolated"].get<std::string>()) << "\n";
            }
        }
    }
    return emit(c, body.str(), out, err) ? exit_pass : exit_io;
}

int report_discrepancy(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const long max_m = c.n.value_or(4);
    std::vector<std::function<json()>> tasks;
    for (long p : c.primes) {
        for (const auto& qs : c.qs) {
            for (const auto& x : gamma_xs(c, p)) {
                tasks.push_back([=, &c] {
                    auto ctx = PadicContext::create(p, c.precision);
                    auto q = q_make(qs.t, qs.m, ctx);
                    auto arg = GammaArgument::make(x, q);
                    json params = base_params(q);
                    params["x"] = x.to_string();
                    auto derived = gamma_series(arg, q, c.precision, CoefficientVariant::derived_coefficient);
                    auto printed = gamma_series(arg, q, c.precision, CoefficientVariant::as_printed);
                    json eq11;
                    eq11["derived_coefficient"] = render(derived.value);
                    eq11["as_printed"] = render(printed.value);
                    eq11["variant_agreement"] = agreement(derived.value, printed.value);
                    eq11["predicted_difference"] = render(printed_coefficient_residual(arg, q));
                    try {
                        auto direct = gamma_direct(arg, q, c.target, depth_for(c, p));
                        eq11["direct"] = render(direct.value);
                        eq11["derived_vs_direct"] = agreement(derived.value, direct.value);
                        eq11["as_printed_vs_direct"] = agreement(printed.value, direct.value);
                        PadicNumber residual = direct.value - printed.value;
                        eq11["as_printed_residual"] = render(residual);
                        eq11["residual_agreement"] = agreement(residual, printed_coefficient_residual(arg, q));
                    } catch (const Error& e) {
                        eq11["direct_error"] = e.what();
                    }
                    json eq3 = json::array();
                    for (long m = 0; m <= max_m; ++m) {
                        PadicNumber d = q_euler_polynomial(m, x, q, Eq3Variant::derived);
                        PadicNumber pr = q_euler_polynomial(m, x, q, Eq3Variant::as_printed);
                        eq3.push_back({{"m", m}, {"derived", render(d)}, {"as_printed", render(pr)},
                                       {"agreement", agreement(d, pr)}});
                    }
                    return json{{"params", params}, {"eq11", eq11}, {"eq3", eq3}};
                });
            }
        }
    }
    std::vector<json> items;
    try {
        items = run_tasks(tasks, c.workers);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return emit(c, json{{"kind", "discrepancy"}, {"items", items}}.dump(2) + "\n", out, err) ? exit_pass : exit_io;
}

int report_t_conjecture(const RunConfig& c, std::ostream& out, std::ostream& err) {
    RunConfig reduced = c;
    if (!c.primes_given) reduced.primes = {3, 5};
    std::vector<Task> tasks;
    for (long p : reduced.primes) {
        for (const auto& qs : reduced.qs) {
            std::vector<Rational> xs = c.xs_given ? c.xs : std::vector<Rational>{Rational(1, p), Rational(2, p)};
            for (const auto& x : xs) {
                tasks.push_back([=, &c] {
                    auto ctx = PadicContext::create(p, c.precision);
                    auto q = q_make(qs.t, qs.m, ctx);
                    try {
                        return Reports{t_gamma_series_conjecture(GammaArgument::make(x, q), q, c.target, audit_options(c, p))};
                    } catch (const Error& e) {
                        json params = base_params(q);
                        params["x"] = x.to_string();
                        auto r = failed_report("t-conjecture", params, c.target, e);
                        r.verdict.reset();
                        return Reports{r};
                    }
                });
            }
        }
    }
    Reports all;
    for (auto& chunk : run_tasks(tasks, c.workers)) {
        for (auto& r : chunk) all.push_back(std::move(r));
    }
    const std::string format = c.format.empty() ? "json" : c.format;
    return emit(c, format_reports(all, format, "t-conjecture"), out, err) ? exit_pass : exit_io;
}

int cmd_report(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.kind == "stability") return report_stability(c, out, err);
    if (c.kind == "discrepancy") return report_discrepancy(c, out, err);
    if (c.kind == "t-conjecture") return report_t_conjecture(c, out, err);
    throw ConfigError("unknown report kind '" + c.kind + "'");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"p-adic q-analysis toolkit: evaluate q-Euler/q-Bernoulli numbers and q-log-gamma values, audit identities"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value file with the same keys as the flags");

    RunConfig c;
    std::vector<std::string> primes, qs, xs;
    long n = -1;
    long max_exp = 0;
    app.add_option("--p", primes, "primes (comma-separated grid)")->delimiter(',');
    app.add_option("--precision", c.precision, "working precision N in digits");
    app.add_option("--q", qs, "deformation q = 1 + t p^m as t,m (repeatable)");
    app.add_option("--x", xs, "arguments a/b (repeatable or comma-separated)")->delimiter(',');
    app.add_option("--n", n, "order / index");
    app.add_option("--K", c.K, "formal series degree");
    app.add_option("--target", c.target, "audit target in digits");
    app.add_option("--max-sum-exponent", max_exp, "largest Riemann-sum depth (p^depth <= 10^7)");
    app.add_flag("--strict", c.strict, "exit 3 when a value does not stabilize");
    app.add_option("--format", c.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--out", c.out, "output file (default stdout)");
    app.add_option("--workers", c.workers, "concurrent grid workers");
    app.add_option("--samples", c.samples, "random pairs per grid point for eq9");
    app.add_option("--seed", c.seed, "seed for eq9 sampling");

    auto* eval = app.add_subcommand("eval", "evaluate a quantity");
    eval->add_option("--quantity", c.quantity, "q-euler, q-bernoulli, classical-euler, classical-bernoulli, gamma, t-gamma, bracket")
        ->required();
    auto* verify = app.add_subcommand("verify", "run identity audits");
    verify->add_option("--suite", c.suite, "eq3, eq6, eq8, eq9, eq10, eq12, thmA, limits or all")->required();
    auto* report = app.add_subcommand("report", "write stability, discrepancy or t-conjecture reports");
    report->add_option("--kind", c.kind, "stability, discrepancy or t-conjecture")->required();
    report->add_option("--quantity", c.quantity, "quantity for stability tables");
    for (auto* sub : {eval, verify, report}) sub->fallthrough();

    std::vector<std::string> argv_store{"padicq"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_pass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_bad_config;
    }

    try {
        for (const auto& p : primes) {
            Rational r = Rational::parse(p);
            if (!r.is_integer() || !r.numerator().fits_slong_p()) throw ConfigError("--p expects integers");
            c.primes.push_back(r.numerator().get_si());
        }
        c.primes_given = !primes.empty();
        // an unquoted q=t,m in a config file arrives split into two entries
        for (std::size_t i = 0; i < qs.size(); ++i) {
            if (qs[i].find(',') == std::string::npos && i + 1 < qs.size() && qs[i + 1].find(',') == std::string::npos) {
                c.qs.push_back(parse_q(qs[i] + "," + qs[i + 1]));
                ++i;
            } else {
                c.qs.push_back(parse_q(qs[i]));
            }
        }
        for (const auto& x : xs) c.xs.push_back(Rational::parse(x));
        c.xs_given = !xs.empty();
        if (app.count("--n")) c.n = n;
        if (app.count("--max-sum-exponent")) c.max_sum_exponent = max_exp;
        validate(c);

        if (eval->parsed()) return cmd_eval(c, out, err);
        if (verify->parsed()) return cmd_verify(c, out, err);
        return cmd_report(c, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_bad_config;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotStabilized) {
            err << "error: " << e.what() << "\n";
            return c.strict ? exit_not_stabilized : exit_audit_fail;
        }
        err << "error: " << e.what() << "\n";
        return exit_bad_config;
    }
}

}  // namespace padicq
