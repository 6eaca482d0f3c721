#pragma once

#include <stdexcept>
#include <string>

namespace matern {

enum class ErrorKind {
    InvalidInput,
    Unsupported,
    UnsupportedGradient,
    SingularSystem,
    Capacity,
    IterativeFailure,
    EmptySurface,
    Numeric,
    Parse,
    Io,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind drives
/// CLI exit codes (numeric failures vs usage/IO failures).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for failures caused by input files or arguments rather than the numerics.
    bool is_usage_error() const noexcept {
        return kind_ == ErrorKind::Io || kind_ == ErrorKind::Parse || kind_ == ErrorKind::InvalidInput ||
               kind_ == ErrorKind::Unsupported;
    }

private:
    ErrorKind kind_;
};

/// Raised when conjugate gradients stops before reaching the tolerance.
class IterativeFailure : public Error {
public:
    IterativeFailure(const std::string& message, double residual, int iterations)
        : Error(ErrorKind::IterativeFailure, message),
          residual_(residual),
          iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace matern
