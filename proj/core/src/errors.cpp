#include "nevdyn/errors.hpp"

namespace nevdyn {

const char* error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
    case ErrorKind::UnknownParameter: return "UnknownParameter";
    case ErrorKind::WrongDims: return "WrongDims";
    case ErrorKind::SweepCapExceeded: return "SweepCapExceeded";
    case ErrorKind::OpinionOverflow: return "OpinionOverflow";
    case ErrorKind::InvariantBreach: return "InvariantBreach";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NoRootConvergence: return "NoRootConvergence";
    case ErrorKind::VerdictMismatch: return "VerdictMismatch";
    }
    return "UnknownError";
}

bool is_usage_error(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidParams:
    case ErrorKind::ConfigError:
    case ErrorKind::UnknownPreset:
    case ErrorKind::UnknownParameter:
    case ErrorKind::WrongDims:
    case ErrorKind::SweepCapExceeded:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + detail), kind_(kind) {}

void raise(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

} // namespace nevdyn
