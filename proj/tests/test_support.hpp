#pragma once

#include <doctest.h>

#include <random>

#include "padicq/padic.hpp"

namespace padicq::testing {

/// A random nonzero rational a/b with |a|,|b| < bound, mapped into Q_p.
inline PadicNumber random_padic(std::mt19937_64& rng, const PadicContext& ctx, long bound = 100000) {
    std::uniform_int_distribution<long> num(-bound, bound);
    std::uniform_int_distribution<long> den(1, bound);
    long a = 0;
    while (a == 0) a = num(rng);
    return PadicNumber::from_rational(a, den(rng), ctx);
}

/// True when a and b agree wherever both are known.
inline bool consistent(const PadicNumber& a, const PadicNumber& b) {
    const long common = std::min(a.absolute_precision(), b.absolute_precision());
    return agreement(a, b) >= common;
}

template <class Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

}  // namespace padicq::testing
