#pragma once

#include <optional>
#include <vector>

#include "padicq/padic.hpp"
#include "padicq/qanalog.hpp"

namespace padicq {

/// Symbolic integrand on Z_p, evaluated at the integer Riemann points.
///
/// The q-dependent families read q from the integral they are handed to; the
/// signed (q = 1) integral evaluates them at their classical limit, so a
/// bracket becomes (c + y)^n and a q-power becomes 1.
struct IntegrandSpec {
    enum class Family { constant, q_power, bracket_monomial, gamma_kernel, tabulated };

    Family family = Family::constant;
    /// constant value, or the centre c of bracket_monomial / gamma_kernel.
    std::optional<PadicNumber> c;
    /// s for q_power, the power n for bracket_monomial.
    long exponent = 0;
    /// tabulated values on residues 0..p^level - 1.
    std::vector<PadicNumber> table;
    long level = 0;
    /// multiply by q^{-y}
    bool weight_q_inverse = false;
    /// evaluate at y + 1 (the weight moves with it)
    bool shifted = false;

    static IntegrandSpec constant(PadicNumber value);
    static IntegrandSpec q_power(long s);
    static IntegrandSpec bracket_monomial(PadicNumber c, long n);
    static IntegrandSpec gamma_kernel(PadicNumber c);
    static IntegrandSpec tabulated(std::vector<PadicNumber> values, long level);

    IntegrandSpec with_weight() const {
        IntegrandSpec r = *this;
        r.weight_q_inverse = true;
        return r;
    }
    IntegrandSpec translated() const {
        IntegrandSpec r = *this;
        r.shifted = true;
        return r;
    }
};

struct IntegralResult {
    PadicNumber value;
    long depth_used = 0;
    /// min of v_p over the last two successive differences.
    long stability_valuation = 0;
    bool converged = false;
};

enum class MeasureKind { fermionic, fermionic_signed, bosonic };

struct IntegrationOptions {
    /// Concurrent workers for the summation; results do not depend on it.
    int workers = 1;
    /// Richardson-extrapolate the partial sums in h = p^N before the stability test.
    bool extrapolate = true;
    /// Hard cap on p^depth.
    long max_summands = 10'000'000;
    /// Do not certify (or stop) before this depth.
    long min_depth = 0;
};

/// Largest depth N with p^N <= summands.
long depth_for_budget(long prime, long summands);

/// I_{-q}(f) = lim 1/[p^N]_{-q} sum_{x < p^N} f(x) (-q)^x.
IntegralResult fermionic_integral(const IntegrandSpec& f, const QParam& q, long target, long max_depth,
                                  const IntegrationOptions& options = {});

/// I_{-1}(f) = lim sum_{x < p^N} f(x) (-1)^x. q, when given, feeds the q-families.
IntegralResult fermionic_integral_signed(const IntegrandSpec& f, const PadicContext& ctx, long target,
                                         long max_depth, const IntegrationOptions& options = {},
                                         const std::optional<QParam>& q = std::nullopt);

/// I_q(f) = lim 1/[p^N]_q sum_{x < p^N} f(x) q^x.
IntegralResult bosonic_integral(const IntegrandSpec& f, const QParam& q, long target, long max_depth,
                                const IntegrationOptions& options = {});

/// All moments [c + y]_q^k (times q^{-y} when weighted), k = 0..max_power, in one pass.
std::vector<IntegralResult> bracket_moments(MeasureKind kind, const PadicNumber& c, long max_power,
                                            const QParam& q, bool weighted, long target, long max_depth,
                                            const IntegrationOptions& options = {});

struct StabilityRow {
    long depth = 0;
    PadicNumber partial_sum;
    /// v_p(S_N - S_{N-1}); absent on the first row.
    std::optional<long> difference_valuation;
    PadicNumber extrapolated;
    std::optional<long> extrapolated_difference_valuation;
};

/// Raw partial sums S_N for N in [first_depth, last_depth] with their successive differences.
std::vector<StabilityRow> stability_report(const IntegrandSpec& f, const QParam& q, MeasureKind kind,
                                           long first_depth, long last_depth,
                                           const IntegrationOptions& options = {});

}  // namespace padicq
