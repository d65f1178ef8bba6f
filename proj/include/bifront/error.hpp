#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bifront {

enum class ErrorKind {
    Domain,
    MalformedModel,
    DegenerateEndpoint,
    Stiffness,
    InvalidInput,
    CorruptedTrajectory,
    ConstraintViolation,
    InternalInconsistency,
    ClassificationInconsistency,
    UnsupportedRegime,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::MalformedModel: return "malformed-model";
    case ErrorKind::DegenerateEndpoint: return "degenerate-endpoint";
    case ErrorKind::Stiffness: return "stiffness";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::CorruptedTrajectory: return "corrupted-trajectory";
    case ErrorKind::ConstraintViolation: return "constraint-violation";
    case ErrorKind::InternalInconsistency: return "internal-inconsistency";
    case ErrorKind::ClassificationInconsistency: return "classification-inconsistency";
    case ErrorKind::UnsupportedRegime: return "unsupported-regime";
    }
    return "unknown";
}

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace bifront
