#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace speclab {

enum class ErrorKind {
    InvalidDimension,
    DivergentEnergy,
    InvalidParameter,
    InvalidGrid,
    DegenerateWeight,
    TruncationError,
    NumericBreakdown,
    InvalidDensity,
    SingularPoint,
    SingularEvaluation,
    NoConvergence,
    UnsupportedIndex,
    ParseError,
};

// Stable kebab-case names; the CLI prints these on stderr.
constexpr std::string_view error_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::DivergentEnergy: return "divergent-energy";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidGrid: return "invalid-grid";
    case ErrorKind::DegenerateWeight: return "degenerate-weight";
    case ErrorKind::TruncationError: return "truncation-error";
    case ErrorKind::NumericBreakdown: return "numeric-breakdown";
    case ErrorKind::InvalidDensity: return "invalid-density";
    case ErrorKind::SingularPoint: return "singular-point";
    case ErrorKind::SingularEvaluation: return "singular-evaluation";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::UnsupportedIndex: return "unsupported-index";
    case ErrorKind::ParseError: return "parse-error";
    }
    return "unknown";
}

/// True for errors caused by the numerics rather than by bad input.
constexpr bool is_numeric_failure(ErrorKind kind) {
    return kind == ErrorKind::NumericBreakdown || kind == ErrorKind::NoConvergence;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(error_name(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return error_name(kind_); }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) {
    throw Error(kind, detail);
}

} // namespace speclab
