#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace padicq {

enum class ErrorCode {
    NonPrime,
    EvenPrime,
    BadPrecision,
    ZeroDenominator,
    DivisionByZero,
    ContextMismatch,
    PrecisionExhausted,
    ZeroHasNoValuation,
    NotAUnit,
    OutsideConvergenceDomain,
    NotAOneUnit,
    ZeroArgument,
    SyntaxError,
    DepthTooSmall,
    UnitPartDivisible,
    ExponentOutOfDomain,
    IntegrandDomainError,
    BudgetExceeded,
    BoundExceeded,
    SeriesBudgetExceeded,
    NotStabilized,
    InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace padicq
