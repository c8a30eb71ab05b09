#pragma once

#include <stdexcept>
#include <string>

namespace utc {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A matrix required to be symmetric is not, beyond tolerance.
class NotSymmetricError : public Error {
public:
    using Error::Error;
};

/// A matrix required to be positive semi-definite has an eigenvalue
/// below the admissible tolerance.
class NotPsdError : public Error {
public:
    using Error::Error;
};

/// The closed-loop matrix is not Schur-stable, so no Lyapunov solution
/// is guaranteed to exist.
class NotSchurError : public Error {
public:
    using Error::Error;
};

/// A linear system is singular or too ill-conditioned to solve reliably.
class SingularError : public Error {
public:
    using Error::Error;
};

/// A discretization or integration step size is not strictly positive.
class NonPositiveStepError : public Error {
public:
    using Error::Error;
};

/// Pitch angle too close to +-pi/2; the Euler-rate map blows up there.
class GimbalLockError : public Error {
public:
    using Error::Error;
};

/// Configuration file failed validation. The message names the offending
/// key (or parse location) and the violated constraint.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File output failed.
class IoError : public Error {
public:
    using Error::Error;
};

/// An error raised inside a simulation loop, annotated with the step index.
class SimStepError : public Error {
public:
    SimStepError(int step, const std::string& cause)
        : Error("step " + std::to_string(step) + ": " + cause), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

}  // namespace utc
