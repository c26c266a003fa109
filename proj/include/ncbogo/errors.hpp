#pragma once

#include <stdexcept>
#include <string>

namespace ncbogo {

/// Base class of every error raised by the library. The C API maps each
/// subclass onto a distinct status code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or an unreadable/malformed configuration.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Arrays or fields that do not live on the same grid / have wrong sizes.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. k = 0).
class DomainError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual) {}
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Time integration lost a conserved quantity beyond its guard threshold.
class IntegratorError : public Error {
public:
    using Error::Error;
};

/// A field has a significant component outside the retained mode space.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Requested problem exceeds the configured size limits.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Quasiparticle spectrum is not real and nonnegative.
class InstabilityError : public Error {
public:
    using Error::Error;
};

} // namespace ncbogo
