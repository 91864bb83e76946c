#include "padicq/integrals.hpp"

#include <algorithm>
#include <memory>
#include <thread>

namespace padicq {

IntegrandSpec IntegrandSpec::constant(PadicNumber value) {
    IntegrandSpec s;
    s.family = Family::constant;
    s.c = std::move(value);
    return s;
}

IntegrandSpec IntegrandSpec::q_power(long s_exp) {
    IntegrandSpec s;
    s.family = Family::q_power;
    s.exponent = s_exp;
    return s;
}

IntegrandSpec IntegrandSpec::bracket_monomial(PadicNumber c, long n) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "bracket exponent must be >= 0");
    IntegrandSpec s;
    s.family = Family::bracket_monomial;
    s.c = std::move(c);
    s.exponent = n;
    return s;
}

IntegrandSpec IntegrandSpec::gamma_kernel(PadicNumber c) {
    IntegrandSpec s;
    s.family = Family::gamma_kernel;
    s.c = std::move(c);
    return s;
}

IntegrandSpec IntegrandSpec::tabulated(std::vector<PadicNumber> values, long level) {
    IntegrandSpec s;
    s.family = Family::tabulated;
    s.table = std::move(values);
    s.level = level;
    return s;
}

long depth_for_budget(long prime, long summands) {
    long depth = 0;
    long count = 1;
    while (count <= summands / prime) {
        count *= prime;
        ++depth;
    }
    return depth;
}

namespace {

// ---------------------------------------------------------------------------
// Residue arithmetic mod p^W shared by the integrand cursors.

struct Ring {
    explicit Ring(PadicContext seed) : seed_ctx(std::move(seed)) {}
    long p = 0;
    long digits = 0;  // W
    mpz_class mod;    // p^W
    PadicContext seed_ctx;
    std::optional<QParam> q;  // in seed_ctx; empty means the classical limit q = 1
    mpz_class q_res = 1;
    mpz_class q_inv = 1;

    void reduce(mpz_class& a) const { mpz_fdiv_r(a.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()); }
    void mul(mpz_class& r, const mpz_class& a, const mpz_class& b) const {
        mpz_mul(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        reduce(r);
    }
    mpz_class power_of_p(long k) const { return k >= digits ? mpz_class(0) : seed_ctx.power(k); }
    /// q^e for an integer exponent of either sign (1 in the classical limit).
    mpz_class q_power(const mpz_class& e) const {
        mpz_class r;
        if (e >= 0) {
            mpz_powm(r.get_mpz_t(), q_res.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
        } else {
            mpz_class ne = -e;
            mpz_powm(r.get_mpz_t(), q_inv.get_mpz_t(), ne.get_mpz_t(), mod.get_mpz_t());
        }
        return r;
    }
    /// x known in seed_ctx with valuation >= 0, as a residue; records how many digits are known.
    mpz_class residue(const PadicNumber& x, long& known) const {
        known = std::min(known, std::min(digits, x.absolute_precision()));
        if (x.is_zero()) return 0;
        if (x.valuation() < 0) throw Error(ErrorCode::InvalidArgument, "non-integral seed");
        return x.residue(std::min(digits, x.absolute_precision()));
    }
    /// [z]_q and q^z at a seed point (classical limit: z and 1).
    std::pair<PadicNumber, PadicNumber> bracket_and_power(const PadicNumber& z) const {
        if (!q) return {z, PadicNumber::one(seed_ctx)};
        try {
            return {q_bracket(z, *q), q_pow(*q, z)};
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ExponentOutOfDomain)
                throw Error(ErrorCode::IntegrandDomainError, "q^(c+y) undefined for this centre");
            throw;
        }
    }
};

class Cursor {
public:
    virtual ~Cursor() = default;
    /// p^scale_j f_j(y) mod p^W for each output j.
    virtual void read(std::vector<mpz_class>& out) = 0;
    virtual void step() = 0;
    long known_digits = 0;
};

class Source {
public:
    virtual ~Source() = default;
    virtual std::size_t width() const = 0;
    virtual long scale(std::size_t j) const = 0;
    virtual std::unique_ptr<Cursor> open(const mpz_class& y) const = 0;
};

long centre_shift(const std::optional<PadicNumber>& c) {
    if (!c || c->is_zero()) return 0;
    return std::max(0L, -c->valuation());
}

PadicNumber seed_point(const Ring& ring, const PadicNumber& c, const mpz_class& y) {
    return c.rebased(ring.seed_ctx) + PadicNumber::from_integer(y, ring.seed_ctx);
}

// f = c
class ConstantSource final : public Source {
public:
    ConstantSource(const Ring& ring, const PadicNumber& c) : scale_(centre_shift(c)) {
        PadicNumber scaled = c.rebased(ring.seed_ctx) * PadicNumber::from_integer(ring.seed_ctx.power(scale_), ring.seed_ctx);
        known_ = ring.digits;
        value_ = ring.residue(scaled, known_);
    }
    std::size_t width() const override { return 1; }
    long scale(std::size_t) const override { return scale_; }
    std::unique_ptr<Cursor> open(const mpz_class&) const override {
        struct C final : Cursor {
            mpz_class v;
            void read(std::vector<mpz_class>& out) override { out[0] = v; }
            void step() override {}
        };
        auto cur = std::make_unique<C>();
        cur->v = value_;
        cur->known_digits = known_;
        return cur;
    }

private:
    long scale_;
    long known_ = 0;
    mpz_class value_;
};

// f = q^{s y}
class QPowerSource final : public Source {
public:
    QPowerSource(const Ring& ring, long s) : ring_(ring), s_(s) { step_ = ring.q_power(s); }
    std::size_t width() const override { return 1; }
    long scale(std::size_t) const override { return 0; }
    std::unique_ptr<Cursor> open(const mpz_class& y) const override {
        struct C final : Cursor {
            const Ring* ring;
            mpz_class g, step_mul;
            void read(std::vector<mpz_class>& out) override { out[0] = g; }
            void step() override { ring->mul(g, g, step_mul); }
        };
        auto cur = std::make_unique<C>();
        cur->ring = &ring_;
        cur->g = ring_.q_power(mpz_class(y * s_));
        cur->step_mul = step_;
        cur->known_digits = ring_.digits;
        return cur;
    }

private:
    const Ring& ring_;
    long s_;
    mpz_class step_;
};

// f_k = [c + y]_q^k for the requested powers k.
class BracketSource final : public Source {
public:
    BracketSource(const Ring& ring, PadicNumber c, std::vector<long> powers)
        : ring_(ring), c_(std::move(c)), powers_(std::move(powers)), e_(centre_shift(c_)) {
        pe_ = ring.power_of_p(e_);
        max_power_ = powers_.empty() ? 0 : *std::max_element(powers_.begin(), powers_.end());
    }
    std::size_t width() const override { return powers_.size(); }
    long scale(std::size_t j) const override { return powers_[j] * e_; }
    std::unique_ptr<Cursor> open(const mpz_class& y) const override {
        struct C final : Cursor {
            const BracketSource* src;
            mpz_class v, qc, tmp;
            std::vector<mpz_class> pw;
            void read(std::vector<mpz_class>& out) override {
                const Ring& r = src->ring_;
                pw[0] = 1;
                for (long k = 1; k <= src->max_power_; ++k) r.mul(pw[k], pw[k - 1], v);
                for (std::size_t j = 0; j < src->powers_.size(); ++j) out[j] = pw[src->powers_[j]];
            }
            void step() override {
                const Ring& r = src->ring_;
                mpz_mul(tmp.get_mpz_t(), qc.get_mpz_t(), src->pe_.get_mpz_t());
                v += tmp;
                r.reduce(v);
                r.mul(qc, qc, r.q_res);
            }
        };
        auto cur = std::make_unique<C>();
        cur->src = this;
        cur->pw.resize(static_cast<std::size_t>(max_power_) + 1);
        const PadicContext& sc = ring_.seed_ctx;
        auto [bracket, power] = ring_.bracket_and_power(seed_point(ring_, c_, y));
        long known = ring_.digits;
        cur->v = ring_.residue(bracket * PadicNumber::from_integer(sc.power(e_), sc), known);
        cur->qc = ring_.residue(power, known);
        cur->known_digits = known;
        return cur;
    }

private:
    const Ring& ring_;
    PadicNumber c_;
    std::vector<long> powers_;
    long e_;
    long max_power_ = 0;
    mpz_class pe_;
};

// f = [c + y]_q (log_iw [c + y]_q - 1), for v_p(c) < 0.
//
// With U = p^e [c+y]_q a unit, p^e f = U (log_iw U - 1), and consecutive points
// differ by log(1 + p^e q^{c+y} / U), a 1-unit of depth e.
class GammaSource final : public Source {
public:
    GammaSource(const Ring& ring, PadicNumber c) : ring_(ring), c_(std::move(c)), e_(centre_shift(c_)) {
        if (e_ == 0)
            throw Error(ErrorCode::IntegrandDomainError,
                        "gamma kernel needs v_p(c) < 0: [c+y]_q is divisible by p at y = -c mod p");
        pe_ = ring.power_of_p(e_);
        const long p = ring.p;
        // coefficient of d^k in log(1 + p^e d) = sum (-1)^{k+1} p^{ke} d^k / k
        for (long k = 1;; ++k) {
            long vk = 0;
            long kk = k;
            while (kk % p == 0) {
                kk /= p;
                ++vk;
            }
            long shift = k * e_ - vk;
            if (shift >= ring.digits) {
                // every later k has k e - v_p(k) at least as large
                long lb = (k + 1) * e_;
                long t = k + 1;
                long logt = 0;
                while (t >= p) {
                    t /= p;
                    ++logt;
                }
                if (lb - logt >= ring.digits) break;
                coeffs_.emplace_back(0);
                continue;
            }
            mpz_class inv;
            mpz_class kk_z = kk;
            mpz_invert(inv.get_mpz_t(), kk_z.get_mpz_t(), ring.mod.get_mpz_t());
            mpz_class coeff = inv * ring.power_of_p(shift);
            if (k % 2 == 0) coeff = -coeff;
            ring.reduce(coeff);
            coeffs_.push_back(std::move(coeff));
        }
    }
    std::size_t width() const override { return 1; }
    long scale(std::size_t) const override { return e_; }
    std::unique_ptr<Cursor> open(const mpz_class& y) const override {
        struct C final : Cursor {
            const GammaSource* src;
            mpz_class u, log_u, qc, inv, d, acc, tmp;
            void read(std::vector<mpz_class>& out) override {
                const Ring& r = src->ring_;
                tmp = log_u - 1;
                r.mul(out[0], u, tmp);
            }
            void step() override {
                const Ring& r = src->ring_;
                if (mpz_invert(inv.get_mpz_t(), u.get_mpz_t(), r.mod.get_mpz_t()) == 0)
                    throw Error(ErrorCode::IntegrandDomainError, "[c+y]_q lost its unit part");
                r.mul(d, qc, inv);
                // Horner on sum_k coeff_k d^k
                acc = 0;
                for (auto it = src->coeffs_.rbegin(); it != src->coeffs_.rend(); ++it) {
                    acc += *it;
                    r.mul(acc, acc, d);
                }
                log_u += acc;
                r.reduce(log_u);
                mpz_mul(tmp.get_mpz_t(), qc.get_mpz_t(), src->pe_.get_mpz_t());
                u += tmp;
                r.reduce(u);
                r.mul(qc, qc, r.q_res);
            }
        };
        auto cur = std::make_unique<C>();
        cur->src = this;
        const PadicContext& sc = ring_.seed_ctx;
        auto [bracket, power] = ring_.bracket_and_power(seed_point(ring_, c_, y));
        if (bracket.is_zero() || bracket.valuation() != -e_)
            throw Error(ErrorCode::IntegrandDomainError, "[c+y]_q does not have valuation v_p(c)");
        long known = ring_.digits;
        PadicNumber unit = bracket * PadicNumber::from_integer(sc.power(e_), sc);
        cur->u = ring_.residue(unit, known);
        cur->log_u = ring_.residue(log_iwasawa(unit), known);
        cur->qc = ring_.residue(power, known);
        cur->known_digits = known;
        return cur;
    }

private:
    const Ring& ring_;
    PadicNumber c_;
    long e_;
    mpz_class pe_;
    std::vector<mpz_class> coeffs_;
};

class TabulatedSource final : public Source {
public:
    TabulatedSource(const Ring& ring, const std::vector<PadicNumber>& values, long level) {
        if (level < 0) throw Error(ErrorCode::InvalidArgument, "negative table level");
        period_ = ring.seed_ctx.power(level);
        if (!period_.fits_slong_p() || static_cast<long>(values.size()) != period_.get_si())
            throw Error(ErrorCode::IntegrandDomainError, "table must cover every residue mod p^level");
        scale_ = 0;
        for (const auto& v : values) {
            if (!v.is_zero()) scale_ = std::max(scale_, -v.valuation());
        }
        known_ = ring.digits;
        const PadicContext& sc = ring.seed_ctx;
        PadicNumber shift = PadicNumber::from_integer(sc.power(scale_), sc);
        for (const auto& v : values) residues_.push_back(ring.residue(v.rebased(sc) * shift, known_));
    }
    std::size_t width() const override { return 1; }
    long scale(std::size_t) const override { return scale_; }
    std::unique_ptr<Cursor> open(const mpz_class& y) const override {
        struct C final : Cursor {
            const TabulatedSource* src;
            long index = 0;
            void read(std::vector<mpz_class>& out) override { out[0] = src->residues_[static_cast<std::size_t>(index)]; }
            void step() override {
                if (++index == static_cast<long>(src->residues_.size())) index = 0;
            }
        };
        auto cur = std::make_unique<C>();
        cur->src = this;
        mpz_class r = y % period_;
        cur->index = r.get_si();
        cur->known_digits = known_;
        return cur;
    }

private:
    mpz_class period_;
    long scale_ = 0;
    long known_ = 0;
    std::vector<mpz_class> residues_;
};

// ---------------------------------------------------------------------------
// Summation engine.

struct Plan {
    MeasureKind kind;
    PadicContext out_ctx;
    PadicContext work_ctx;
    std::optional<QParam> q_work;
    bool weighted = false;
    long shift = 0;
};

// Neville extrapolation to h = 0 through the nodes (p^i, s_i), i = 1..n.
PadicNumber extrapolate_to_zero(const std::vector<PadicNumber>& s, const PadicContext& ctx) {
    std::vector<PadicNumber> t = s;
    std::vector<PadicNumber> h;
    h.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) h.push_back(PadicNumber::from_integer(ctx.power(static_cast<long>(i) + 1), ctx));
    const std::size_t n = s.size();
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t i = n - 1; i >= k; --i) {
            t[i] = (h[i - k] * t[i] - h[i] * t[i - 1]) / (h[i - k] - h[i]);
            if (i == k) break;
        }
    }
    return t.back();
}

class Engine {
public:
    Engine(const Source& src, const Ring& ring, Plan plan, const IntegrationOptions& options)
        : src_(src), ring_(ring), plan_(std::move(plan)), options_(options) {
        const std::size_t w = src.width();
        acc_.assign(w, mpz_class(0));
        history_.resize(w);
        extrapolated_.resize(w);
        diffs_.resize(w);
        // weight per step: measure part times the optional q^{-y}
        mpz_class m = 1;
        switch (plan_.kind) {
            case MeasureKind::fermionic: m = -ring.q_res; break;
            case MeasureKind::fermionic_signed: m = -1; break;
            case MeasureKind::bosonic: m = ring.q_res; break;
        }
        if (plan_.weighted) m *= ring.q_inv;
        ring.reduce(m);
        step_weight_ = m;
    }

    /// Runs depths 1..max_depth; when `stop_early`, stops once every output has converged.
    void run(long target, long max_depth, bool stop_early) {
        results_.assign(src_.width(), std::nullopt);
        mpz_class y = 0;
        for (long depth = 1; depth <= max_depth; ++depth) {
            mpz_class end = ring_.seed_ctx.power(depth);
            sum_range(y, end);
            y = end;
            record_depth(depth, target);
            if (stop_early && std::all_of(results_.begin(), results_.end(), [](const auto& r) { return r.has_value(); }))
                break;
        }
        for (std::size_t j = 0; j < results_.size(); ++j) {
            if (results_[j]) continue;
            IntegralResult r{finalize(j), depth_reached_, last_stability(j), false};
            results_[j] = std::move(r);
        }
    }

    std::vector<IntegralResult> results() const {
        std::vector<IntegralResult> out;
        for (const auto& r : results_) out.push_back(*r);
        return out;
    }

    const std::vector<PadicNumber>& raw(std::size_t j) const { return history_[j]; }
    const std::vector<PadicNumber>& extrapolated(std::size_t j) const { return extrapolated_[j]; }

private:
    mpz_class weight_at(const mpz_class& y) const {
        mpz_class exponent = 0;
        if (plan_.kind != MeasureKind::fermionic_signed) exponent += y;
        if (plan_.weighted) exponent -= y + plan_.shift;
        mpz_class w = ring_.q_power(exponent);
        if (plan_.kind != MeasureKind::bosonic && mpz_odd_p(y.get_mpz_t())) w = -w;
        ring_.reduce(w);
        return w;
    }

    void accumulate(Cursor& cur, mpz_class& w, const mpz_class& count, std::vector<mpz_class>& acc) const {
        const std::size_t width = acc.size();
        std::vector<mpz_class> vals(width);
        const bool unit_step = step_weight_ == 1;
        const unsigned long n = count.get_ui();
        for (unsigned long i = 0; i < n; ++i) {
            cur.read(vals);
            for (std::size_t j = 0; j < width; ++j) mpz_addmul(acc[j].get_mpz_t(), w.get_mpz_t(), vals[j].get_mpz_t());
            if (!unit_step) ring_.mul(w, w, step_weight_);
            cur.step();
            if ((i & 31) == 31) {
                for (auto& a : acc) ring_.reduce(a);
            }
        }
        for (auto& a : acc) ring_.reduce(a);
    }

    void sum_range(const mpz_class& begin, const mpz_class& end) {
        const mpz_class total = end - begin;
        const int workers = std::max(1, options_.workers);
        if (workers == 1 || total < 4096) {
            if (!cursor_) {
                cursor_ = src_.open(begin + plan_.shift);
                weight_ = weight_at(begin);
                known_ = std::min(ring_.digits, cursor_->known_digits);
            }
            accumulate(*cursor_, weight_, total, acc_);
            return;
        }
        // Fixed blocks, combined in block order.
        cursor_.reset();
        std::vector<std::vector<mpz_class>> partial(static_cast<std::size_t>(workers),
                                                    std::vector<mpz_class>(acc_.size(), mpz_class(0)));
        std::vector<long> known(static_cast<std::size_t>(workers), ring_.digits);
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        std::vector<std::thread> threads;
        const mpz_class chunk = total / workers;
        for (int b = 0; b < workers; ++b) {
            mpz_class lo = begin + chunk * b;
            mpz_class hi = b + 1 == workers ? end : begin + chunk * (b + 1);
            threads.emplace_back([this, lo, hi, b, &partial, &known, &errors] {
                try {
                    auto cur = src_.open(lo + plan_.shift);
                    known[static_cast<std::size_t>(b)] = cur->known_digits;
                    mpz_class w = weight_at(lo);
                    accumulate(*cur, w, mpz_class(hi - lo), partial[static_cast<std::size_t>(b)]);
                } catch (...) {
                    errors[static_cast<std::size_t>(b)] = std::current_exception();
                }
            });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
        for (int b = 0; b < workers; ++b) {
            known_ = std::min(known_, known[static_cast<std::size_t>(b)]);
            for (std::size_t j = 0; j < acc_.size(); ++j) {
                acc_[j] += partial[static_cast<std::size_t>(b)][j];
                ring_.reduce(acc_[j]);
            }
        }
    }

    PadicNumber normalizer(long depth) const {
        const PadicContext& ctx = plan_.work_ctx;
        const PadicNumber one = PadicNumber::one(ctx);
        switch (plan_.kind) {
            case MeasureKind::fermionic_signed: return one;
            case MeasureKind::fermionic: return q_bracket_neg(ctx.power(depth), *plan_.q_work);
            case MeasureKind::bosonic: {
                const PadicNumber& q = plan_.q_work->value();
                return (one - q.pow(ctx.power(depth))) / (one - q);
            }
        }
        return one;
    }

    void record_depth(long depth, long target) {
        depth_reached_ = depth;
        const PadicContext& ctx = plan_.work_ctx;
        PadicNumber norm = normalizer(depth);
        for (std::size_t j = 0; j < acc_.size(); ++j) {
            PadicNumber s = PadicNumber::from_residue(acc_[j], known_, -src_.scale(j), ctx) / norm;
            history_[j].push_back(s);
            PadicNumber t = options_.extrapolate ? extrapolate_to_zero(history_[j], ctx) : s;
            if (!extrapolated_[j].empty()) diffs_[j].push_back(agreement(t, extrapolated_[j].back()));
            extrapolated_[j].push_back(t);
            if (results_[j] || diffs_[j].size() < 2 || depth < options_.min_depth) continue;
            const long last = diffs_[j][diffs_[j].size() - 1];
            const long prev = diffs_[j][diffs_[j].size() - 2];
            if (last >= target && prev >= target) {
                results_[j] = IntegralResult{finalize(j), depth, std::min(last, prev), true};
            }
        }
    }

    long last_stability(std::size_t j) const {
        const auto& d = diffs_[j];
        if (d.empty()) return 0;
        if (d.size() == 1) return d.back();
        return std::min(d[d.size() - 1], d[d.size() - 2]);
    }

    PadicNumber finalize(std::size_t j) const {
        PadicNumber v = extrapolated_[j].back();
        if (!diffs_[j].empty()) v = v.with_absolute_precision(diffs_[j].back());
        return v.rebased(plan_.out_ctx);
    }

    const Source& src_;
    const Ring& ring_;
    Plan plan_;
    IntegrationOptions options_;
    mpz_class step_weight_;
    std::vector<mpz_class> acc_;
    std::unique_ptr<Cursor> cursor_;
    mpz_class weight_;
    long known_ = 0;
    long depth_reached_ = 0;
    std::vector<std::vector<PadicNumber>> history_;
    std::vector<std::vector<PadicNumber>> extrapolated_;
    std::vector<std::vector<long>> diffs_;
    std::vector<std::optional<IntegralResult>> results_;
};

void check_budget(long prime, long max_depth, const IntegrationOptions& options) {
    if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be >= 1");
    if (options.min_depth > max_depth) throw Error(ErrorCode::InvalidArgument, "min_depth exceeds max_depth");
    if (max_depth > depth_for_budget(prime, options.max_summands))
        throw Error(ErrorCode::BudgetExceeded,
                    "p^" + std::to_string(max_depth) + " summands exceed the budget of " +
                        std::to_string(options.max_summands));
}

long spec_scale(const IntegrandSpec& f) {
    switch (f.family) {
        case IntegrandSpec::Family::bracket_monomial: return f.exponent * centre_shift(f.c);
        case IntegrandSpec::Family::gamma_kernel:
        case IntegrandSpec::Family::constant: return centre_shift(f.c);
        case IntegrandSpec::Family::tabulated: {
            long s = 0;
            for (const auto& v : f.table) {
                if (!v.is_zero()) s = std::max(s, -v.valuation());
            }
            return s;
        }
        case IntegrandSpec::Family::q_power: return 0;
    }
    return 0;
}

struct Setup {
    Ring ring;
    Plan plan;
};

// Working precision: the output context's digits plus the integrand scale, the
// digits the bosonic normalizer eats, and a guard.
Setup make_setup(MeasureKind kind, const PadicContext& out_ctx, const std::optional<QParam>& q, long scale,
                 long max_depth, bool weighted, bool shifted) {
    constexpr long guard = 8;
    const long depth_loss = kind == MeasureKind::bosonic ? max_depth + 2 : 0;
    const long digits = out_ctx.precision() + scale + depth_loss + guard;
    const long m = q ? q->one_unit_depth() : 0;
    Setup s{Ring(out_ctx.with_precision(static_cast<int>(digits + 2 * scale + m + 16))),
            Plan{kind, out_ctx, out_ctx.with_precision(static_cast<int>(digits + 8)), std::nullopt, weighted,
                 shifted ? 1 : 0}};
    s.ring.p = out_ctx.prime();
    s.ring.digits = digits;
    s.ring.mod = s.ring.seed_ctx.power(digits);
    if (q) {
        s.ring.q = q->in(s.ring.seed_ctx);
        s.ring.q_res = s.ring.q->value().residue(digits);
        mpz_invert(s.ring.q_inv.get_mpz_t(), s.ring.q_res.get_mpz_t(), s.ring.mod.get_mpz_t());
        s.plan.q_work = q->in(s.plan.work_ctx);
    }
    return s;
}

std::unique_ptr<Source> make_source(const IntegrandSpec& f, const Ring& ring) {
    auto need_c = [&] {
        if (!f.c) throw Error(ErrorCode::InvalidArgument, "integrand needs a centre/value");
        return *f.c;
    };
    switch (f.family) {
        case IntegrandSpec::Family::constant: return std::make_unique<ConstantSource>(ring, need_c());
        case IntegrandSpec::Family::q_power: return std::make_unique<QPowerSource>(ring, f.exponent);
        case IntegrandSpec::Family::bracket_monomial:
            return std::make_unique<BracketSource>(ring, need_c(), std::vector<long>{f.exponent});
        case IntegrandSpec::Family::gamma_kernel: return std::make_unique<GammaSource>(ring, need_c());
        case IntegrandSpec::Family::tabulated: return std::make_unique<TabulatedSource>(ring, f.table, f.level);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown integrand family");
}

IntegralResult integrate(MeasureKind kind, const IntegrandSpec& f, const PadicContext& ctx,
                         const std::optional<QParam>& q, long target, long max_depth,
                         const IntegrationOptions& options) {
    check_budget(ctx.prime(), max_depth, options);
    if (f.c && f.c->prime() != ctx.prime()) throw Error(ErrorCode::ContextMismatch, "integrand prime differs");
    Setup s = make_setup(kind, ctx, q, spec_scale(f), max_depth, f.weight_q_inverse, f.shifted);
    auto src = make_source(f, s.ring);
    Engine engine(*src, s.ring, s.plan, options);
    engine.run(target, max_depth, true);
    return engine.results().front();
}

}  // namespace

IntegralResult fermionic_integral(const IntegrandSpec& f, const QParam& q, long target, long max_depth,
                                  const IntegrationOptions& options) {
    return integrate(MeasureKind::fermionic, f, q.context(), q, target, max_depth, options);
}

IntegralResult fermionic_integral_signed(const IntegrandSpec& f, const PadicContext& ctx, long target,
                                         long max_depth, const IntegrationOptions& options,
                                         const std::optional<QParam>& q) {
    if (q && q->context().prime() != ctx.prime()) throw Error(ErrorCode::ContextMismatch, "q prime differs");
    return integrate(MeasureKind::fermionic_signed, f, ctx, q ? std::optional<QParam>(q->in(ctx)) : std::nullopt,
                     target, max_depth, options);
}

IntegralResult bosonic_integral(const IntegrandSpec& f, const QParam& q, long target, long max_depth,
                                const IntegrationOptions& options) {
    return integrate(MeasureKind::bosonic, f, q.context(), q, target, max_depth, options);
}

std::vector<IntegralResult> bracket_moments(MeasureKind kind, const PadicNumber& c, long max_power,
                                            const QParam& q, bool weighted, long target, long max_depth,
                                            const IntegrationOptions& options) {
    if (max_power < 0) throw Error(ErrorCode::InvalidArgument, "max_power must be >= 0");
    const PadicContext& ctx = q.context();
    check_budget(ctx.prime(), max_depth, options);
    std::optional<QParam> qq;
    if (kind != MeasureKind::fermionic_signed) qq = q;
    Setup s = make_setup(kind, ctx, qq, max_power * centre_shift(c), max_depth, weighted, false);
    std::vector<long> powers;
    for (long k = 0; k <= max_power; ++k) powers.push_back(k);
    BracketSource src(s.ring, c, powers);
    Engine engine(src, s.ring, s.plan, options);
    engine.run(target, max_depth, true);
    return engine.results();
}

std::vector<StabilityRow> stability_report(const IntegrandSpec& f, const QParam& q, MeasureKind kind,
                                           long first_depth, long last_depth, const IntegrationOptions& options) {
    if (first_depth < 1 || first_depth > last_depth)
        throw Error(ErrorCode::InvalidArgument, "bad depth range");
    const PadicContext& ctx = q.context();
    check_budget(ctx.prime(), last_depth, options);
    std::optional<QParam> qq;
    if (kind != MeasureKind::fermionic_signed) qq = q;
    Setup s = make_setup(kind, ctx, qq, spec_scale(f), last_depth, f.weight_q_inverse, f.shifted);
    auto src = make_source(f, s.ring);
    IntegrationOptions opts = options;
    opts.extrapolate = true;
    Engine engine(*src, s.ring, s.plan, opts);
    engine.run(/*target=*/0, last_depth, /*stop_early=*/false);
    std::vector<StabilityRow> rows;
    const auto& raw = engine.raw(0);
    const auto& ext = engine.extrapolated(0);
    for (long n = first_depth; n <= last_depth; ++n) {
        const std::size_t i = static_cast<std::size_t>(n - 1);
        StabilityRow row{n, raw[i].rebased(ctx), std::nullopt, ext[i].rebased(ctx), std::nullopt};
        if (i > 0) {
            row.difference_valuation = agreement(raw[i], raw[i - 1]);
            row.extrapolated_difference_valuation = agreement(ext[i], ext[i - 1]);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace padicq
