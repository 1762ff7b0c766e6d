#pragma once

#include <stdexcept>
#include <string>

namespace ebt {

// Error taxonomy shared by the whole library. Callers that reach the CLI map
// these onto process exit codes: ConfigError -> 2, DataError -> 3, NumericError -> 4.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or out-of-domain data: losses outside the support bound, forecast
// files that do not align with the loss series, bad CSV schemas.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside a kernel's stated domain (x, r or z where the formula is
// undefined or a precondition like r > z fails). Hard error, never a clamp.
struct DomainError : DataError {
    explicit DomainError(const std::string& msg) : DataError(msg) {}
};

// A wealth update that would go negative, or a lambda outside its valid range.
struct InvalidStep : NumericError {
    explicit InvalidStep(const std::string& msg) : NumericError(msg) {}
};

// Optimizer failed to produce a finite fit.
struct FitError : NumericError {
    explicit FitError(const std::string& msg) : NumericError(msg) {}
};

// Loss series and forecast series disagree on indexing or length.
struct AlignmentError : DataError {
    explicit AlignmentError(const std::string& msg) : DataError(msg) {}
};

} // namespace ebt
