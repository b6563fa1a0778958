#pragma once

#include <stdexcept>
#include <string>

namespace us {

enum class ErrorCode {
    NonFiniteEvaluation,
    AmbiguousOrientation,
    NoAdmissibleStep,
    DomainEscape,
    BracketInvalid,
    InsufficientTrace,
    MissingDerivative,
    DomainError,
    BudgetExceeded,
    NonConvergence,
    NoRoot,
    DegenerateSample,
    NoRealStep,
    MaxRootsExceeded,
    UnknownProblem,
    UnknownAlgorithm,
    ParseError,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::NonFiniteEvaluation: return "NonFiniteEvaluation";
    case ErrorCode::AmbiguousOrientation: return "AmbiguousOrientation";
    case ErrorCode::NoAdmissibleStep: return "NoAdmissibleStep";
    case ErrorCode::DomainEscape: return "DomainEscape";
    case ErrorCode::BracketInvalid: return "BracketInvalid";
    case ErrorCode::InsufficientTrace: return "InsufficientTrace";
    case ErrorCode::MissingDerivative: return "MissingDerivative";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::NoRealStep: return "NoRealStep";
    case ErrorCode::MaxRootsExceeded: return "MaxRootsExceeded";
    case ErrorCode::UnknownProblem: return "UnknownProblem";
    case ErrorCode::UnknownAlgorithm: return "UnknownAlgorithm";
    case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

// Every failure in the library is reported through this one type; callers
// switch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace us
