#pragma once

#include <stdexcept>
#include <string>

namespace nevdyn {

/// Failure categories surfaced by the library. The CLI maps these onto exit
/// codes: configuration/usage kinds exit 1, numerical kinds exit 2.
enum class ErrorKind {
    InvalidParams,
    ConfigError,
    UnknownPreset,
    UnknownParameter,
    WrongDims,
    SweepCapExceeded,
    OpinionOverflow,
    InvariantBreach,
    StepUnderflow,
    StepLimitExceeded,
    EmptyTrajectory,
    NoConvergence,
    NoRootConvergence,
    VerdictMismatch,
};

[[nodiscard]] const char* error_kind_name(ErrorKind kind) noexcept;

/// True for kinds caused by bad user input rather than a failed computation.
[[nodiscard]] bool is_usage_error(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail);
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& detail);

} // namespace nevdyn
