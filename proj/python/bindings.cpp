#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <sstream>

#include "padicq/cli.hpp"
#include "padicq/euler_bernoulli.hpp"
#include "padicq/log_gamma.hpp"

namespace py = pybind11;
using namespace padicq;

namespace {

Rational to_rational(const py::handle& obj) {
    if (py::isinstance<py::str>(obj)) return Rational::parse(obj.cast<std::string>());
    if (py::isinstance<py::int_>(obj)) return Rational::parse(py::str(obj).cast<std::string>());
    if (py::hasattr(obj, "numerator") && py::hasattr(obj, "denominator")) {
        return Rational(mpz_class(py::str(obj.attr("numerator")).cast<std::string>()),
                        mpz_class(py::str(obj.attr("denominator")).cast<std::string>()));
    }
    throw py::type_error("expected int, str or fractions.Fraction");
}

py::object to_fraction(const Rational& r) {
    static py::handle fraction = py::module_::import("fractions").attr("Fraction").cast<py::object>().release();
    py::object num = py::int_(py::str(r.numerator().get_str()));
    py::object den = py::int_(py::str(r.denominator().get_str()));
    return py::reinterpret_borrow<py::object>(fraction)(num, den);
}

py::object to_dict(const AuditReport& r) {
    static py::handle loads = py::module_::import("json").attr("loads").cast<py::object>().release();
    return py::reinterpret_borrow<py::object>(loads)(r.to_json().dump());
}

long default_depth(const QParam& q, std::optional<long> max_depth) {
    return max_depth ? *max_depth : depth_for_budget(q.context().prime(), 1'000'000);
}

IntegrationOptions with_workers(int workers) {
    IntegrationOptions o;
    o.workers = workers;
    return o;
}

GammaAuditOptions audit_options(std::optional<long> max_depth, int workers) {
    GammaAuditOptions o;
    o.max_depth = max_depth.value_or(0);
    o.integration.workers = workers;
    return o;
}

GammaArgument gamma_arg(const py::handle& x, const QParam& q) {
    if (py::isinstance<PadicNumber>(x)) return GammaArgument::make(x.cast<PadicNumber>(), q);
    return GammaArgument::make(to_rational(x), q);
}

CoefficientVariant coefficient_variant(const std::string& name) {
    if (name == "derived") return CoefficientVariant::derived_coefficient;
    if (name == "as_printed") return CoefficientVariant::as_printed;
    throw Error(ErrorCode::InvalidArgument, "variant must be 'derived' or 'as_printed'");
}

MeasureKind measure_kind(const std::string& name) {
    if (name == "fermionic") return MeasureKind::fermionic;
    if (name == "fermionic_signed") return MeasureKind::fermionic_signed;
    if (name == "bosonic") return MeasureKind::bosonic;
    throw Error(ErrorCode::InvalidArgument, "kind must be fermionic, fermionic_signed or bosonic");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "p-adic q-analogues: Volkenborn integrals, q-Euler numbers and q-log-gamma";

    static py::handle padicq_error = py::exception<Error>(m, "PadicqError", PyExc_ValueError).release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(padicq_error)(e.what());
            inst.attr("code") = std::string(error_code_name(e.code()));
            PyErr_SetObject(padicq_error.ptr(), inst.ptr());
        }
    });

    py::class_<PadicContext>(m, "Context")
        .def(py::init(&PadicContext::create), py::arg("p"), py::arg("precision"))
        .def_property_readonly("p", &PadicContext::prime)
        .def_property_readonly("precision", &PadicContext::precision)
        .def("with_precision", &PadicContext::with_precision)
        .def(py::self == py::self)
        .def("__repr__", [](const PadicContext& c) {
            return "Context(p=" + std::to_string(c.prime()) + ", precision=" + std::to_string(c.precision()) + ")";
        });

    py::class_<PadicNumber>(m, "Padic")
        .def_static("from_rational", [](const py::object& v, const PadicContext& ctx) {
            return PadicNumber::from_rational(to_rational(v), ctx);
        }, py::arg("value"), py::arg("ctx"))
        .def_static("parse", [](const std::string& text, const PadicContext& ctx) { return parse(text, ctx); })
        .def_static("zero", [](const PadicContext& ctx, std::optional<long> bound) {
            return bound ? PadicNumber::zero(ctx, *bound) : PadicNumber::zero(ctx);
        }, py::arg("ctx"), py::arg("bound") = py::none())
        .def_static("one", &PadicNumber::one)
        .def_property_readonly("context", &PadicNumber::context)
        .def_property_readonly("is_zero", &PadicNumber::is_zero)
        .def_property_readonly("valuation", &PadicNumber::valuation)
        .def_property_readonly("relative_precision", &PadicNumber::relative_precision)
        .def_property_readonly("absolute_precision", &PadicNumber::absolute_precision)
        .def_property_readonly("digits", &PadicNumber::digits)
        .def("__pow__", [](const PadicNumber& a, long e) { return a.pow(e); })
        .def(-py::self)
        .def(py::self + py::self)
        .def(py::self - py::self)
        .def(py::self * py::self)
        .def(py::self / py::self)
        .def(py::self == py::self)
        .def("__str__", &render)
        .def("__repr__", [](const PadicNumber& a) { return "Padic(" + render(a) + ")"; });

    m.def("agreement", &agreement);
    m.def("teichmuller", &teichmuller);
    m.def("exp", &exp_p);
    m.def("log", &log_classical);
    m.def("log_iwasawa", &log_iwasawa);

    py::class_<QParam>(m, "Q")
        .def_property_readonly("value", &QParam::value)
        .def_property_readonly("log_q", &QParam::log_q)
        .def_property_readonly("m", &QParam::one_unit_depth)
        .def_property_readonly("context", &QParam::context)
        .def_property_readonly("exact", [](const QParam& q) { return to_fraction(q.exact()); })
        .def("__repr__", [](const QParam& q) { return "Q(" + q.exact().to_string() + ")"; });
    m.def("q_make", [](long t, long mm, const PadicContext& ctx) { return q_make(t, mm, ctx); },
          py::arg("t"), py::arg("m"), py::arg("ctx"));
    m.def("q_pow", [](const QParam& q, const py::object& x) {
        if (py::isinstance<PadicNumber>(x)) return q_pow(q, x.cast<PadicNumber>());
        return q_pow(q, PadicNumber::from_rational(to_rational(x), q.context()));
    });
    m.def("q_bracket", [](const py::object& x, const QParam& q) {
        if (py::isinstance<PadicNumber>(x)) return q_bracket(x.cast<PadicNumber>(), q);
        // exact x: work m digits deeper so the division by 1 - q costs nothing
        auto wide = q.context().with_precision(q.context().precision() + q.one_unit_depth());
        return q_bracket(PadicNumber::from_rational(to_rational(x), wide), q.in(wide)).rebased(q.context());
    });

    py::class_<IntegralResult>(m, "IntegralResult")
        .def_readonly("value", &IntegralResult::value)
        .def_readonly("depth_used", &IntegralResult::depth_used)
        .def_readonly("stability_valuation", &IntegralResult::stability_valuation)
        .def_readonly("converged", &IntegralResult::converged);

    py::class_<IntegrandSpec>(m, "Integrand")
        .def_static("constant", &IntegrandSpec::constant)
        .def_static("q_power", &IntegrandSpec::q_power)
        .def_static("bracket_monomial", &IntegrandSpec::bracket_monomial)
        .def_static("gamma_kernel", &IntegrandSpec::gamma_kernel)
        .def_static("tabulated", &IntegrandSpec::tabulated)
        .def("with_weight", &IntegrandSpec::with_weight)
        .def("translated", &IntegrandSpec::translated);

    m.def("fermionic_integral", [](const IntegrandSpec& f, const QParam& q, long target, std::optional<long> depth, int workers) {
        return fermionic_integral(f, q, target, default_depth(q, depth), with_workers(workers));
    }, py::arg("f"), py::arg("q"), py::arg("target") = 12, py::arg("max_depth") = py::none(), py::arg("workers") = 1);
    m.def("bosonic_integral", [](const IntegrandSpec& f, const QParam& q, long target, std::optional<long> depth, int workers) {
        return bosonic_integral(f, q, target, default_depth(q, depth), with_workers(workers));
    }, py::arg("f"), py::arg("q"), py::arg("target") = 12, py::arg("max_depth") = py::none(), py::arg("workers") = 1);
    m.def("bracket_moments", [](const std::string& kind, const py::object& c, long max_power, const QParam& q,
                                bool weighted, long target, std::optional<long> depth, int workers) {
        auto wide = q.context().with_precision(2 * q.context().precision() + 64);
        auto centre = py::isinstance<PadicNumber>(c) ? c.cast<PadicNumber>() : PadicNumber::from_rational(to_rational(c), wide);
        return bracket_moments(measure_kind(kind), centre, max_power, q, weighted, target, default_depth(q, depth),
                               with_workers(workers));
    }, py::arg("kind"), py::arg("c"), py::arg("max_power"), py::arg("q"), py::arg("weighted") = false,
       py::arg("target") = 12, py::arg("max_depth") = py::none(), py::arg("workers") = 1);

    m.def("classical_euler", [](long n) { return to_fraction(classical_euler(n)); });
    m.def("classical_bernoulli", [](long n) { return to_fraction(classical_bernoulli(n)); });
    m.def("q_euler_polynomial", [](long mm, const py::object& x, const QParam& q, const std::string& variant) {
        Eq3Variant v = variant == "as_printed" ? Eq3Variant::as_printed : Eq3Variant::derived;
        if (variant != "derived" && variant != "as_printed")
            throw Error(ErrorCode::InvalidArgument, "variant must be 'derived' or 'as_printed'");
        if (py::isinstance<PadicNumber>(x)) return q_euler_polynomial(mm, x.cast<PadicNumber>(), q, v);
        return q_euler_polynomial(mm, to_rational(x), q, v);
    }, py::arg("m"), py::arg("x"), py::arg("q"), py::arg("variant") = "derived");
    m.def("q_euler_number", &q_euler_number);
    m.def("q_bernoulli", [](long n, const QParam& q, long target, std::optional<long> depth, int workers) {
        return q_bernoulli(n, q, target, default_depth(q, depth), with_workers(workers));
    }, py::arg("n"), py::arg("q"), py::arg("target") = 12, py::arg("max_depth") = py::none(), py::arg("workers") = 1);

    py::class_<SeriesEvaluation>(m, "SeriesEvaluation")
        .def_readonly("value", &SeriesEvaluation::value)
        .def_readonly("terms_used", &SeriesEvaluation::terms_used)
        .def_readonly("tail_valuation_bound", &SeriesEvaluation::tail_valuation_bound);
    py::class_<TSeriesEvaluation>(m, "TSeriesEvaluation")
        .def_readonly("value", &TSeriesEvaluation::value)
        .def_readonly("terms_used", &TSeriesEvaluation::terms_used)
        .def_readonly("tail_valuation_bound", &TSeriesEvaluation::tail_valuation_bound)
        .def_readonly("stability_valuation", &TSeriesEvaluation::stability_valuation)
        .def_readonly("depth_used", &TSeriesEvaluation::depth_used);

    m.def("gamma_direct", [](const py::object& x, const QParam& q, long target, std::optional<long> depth, int workers) {
        return gamma_direct(gamma_arg(x, q), q, target, default_depth(q, depth), with_workers(workers));
    }, py::arg("x"), py::arg("q"), py::arg("target") = 12, py::arg("max_depth") = py::none(), py::arg("workers") = 1);
    m.def("gamma_series", [](const py::object& x, const QParam& q, long target, const std::string& variant) {
        return gamma_series(gamma_arg(x, q), q, target, coefficient_variant(variant));
    }, py::arg("x"), py::arg("q"), py::arg("target") = 12, py::arg("variant") = "derived");
    m.def("t_gamma_direct", [](const py::object& x, const QParam& q, long target, std::optional<long> depth, int workers) {
        return t_gamma_direct(gamma_arg(x, q), q, target, default_depth(q, depth), with_workers(workers));
    }, py::arg("x"), py::arg("q"), py::arg("target") = 12, py::arg("max_depth") = py::none(), py::arg("workers") = 1);
    m.def("t_gamma_series", [](const py::object& x, const QParam& q, long target, std::optional<long> depth, int workers) {
        return t_gamma_series(gamma_arg(x, q), q, target, default_depth(q, depth), with_workers(workers));
    }, py::arg("x"), py::arg("q"), py::arg("target") = 12, py::arg("max_depth") = py::none(), py::arg("workers") = 1);

    m.def("verify_translation_identity", [](long n, const QParam& q, long target) {
        return to_dict(verify_translation_identity(n, q, target));
    }, py::arg("n"), py::arg("q"), py::arg("target") = 12);
    m.def("verify_log_series", [](long K) { return to_dict(verify_log_series(K)); }, py::arg("K") = 200);
    m.def("verify_theorem_a", [](const py::object& x, const QParam& q, long target, std::optional<long> depth, int workers) {
        return to_dict(verify_theorem_a(gamma_arg(x, q), q, target, audit_options(depth, workers)));
    }, py::arg("x"), py::arg("q"), py::arg("target") = 12, py::arg("max_depth") = py::none(), py::arg("workers") = 1);
    m.def("verify_gamma_functional_equation", [](const py::object& x, const QParam& q, long target,
                                                 const std::string& evaluator, const std::string& variant,
                                                 std::optional<long> depth, int workers) {
        GammaEvaluator ev;
        if (evaluator == "direct") ev = GammaEvaluator::direct;
        else if (evaluator == "series") ev = GammaEvaluator::series;
        else throw Error(ErrorCode::InvalidArgument, "evaluator must be 'direct' or 'series'");
        return to_dict(verify_gamma_functional_equation(gamma_arg(x, q), q, target, ev, coefficient_variant(variant),
                                                        audit_options(depth, workers)));
    }, py::arg("x"), py::arg("q"), py::arg("target") = 12, py::arg("evaluator") = "series",
       py::arg("variant") = "derived", py::arg("max_depth") = py::none(), py::arg("workers") = 1);
    m.def("t_gamma_series_conjecture", [](const py::object& x, const QParam& q, long target, std::optional<long> depth) {
        return to_dict(t_gamma_series_conjecture(gamma_arg(x, q), q, target, audit_options(depth, 1)));
    }, py::arg("x"), py::arg("q"), py::arg("target") = 12, py::arg("max_depth") = py::none());

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
