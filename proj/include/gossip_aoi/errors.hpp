#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gossip_aoi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model parameter is outside its valid range. `field()` names it.
class InvalidParams : public Error {
public:
    InvalidParams(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class NonConvergence : public Error {
public:
    NonConvergence(long iterations, double residual)
        : Error("relative value iteration did not converge after " +
                std::to_string(iterations) + " iterations (residual " +
                std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}

    long iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    long iterations_;
    double residual_;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

/// The stationary linear system of an induced chain could not be solved.
class SingularChain : public Error {
public:
    using Error::Error;
};

/// A structural check was requested outside the regime where it is defined.
class NotApplicable : public Error {
public:
    using Error::Error;
};

class OutOfGrid : public Error {
public:
    using Error::Error;
};

/// Transmission is not optimal on the diagonal at the requested minimum age.
class NotActive : public Error {
public:
    using Error::Error;
};

/// Two derivations of the same structural quantity disagree.
class Inconsistent : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

} // namespace gossip_aoi
