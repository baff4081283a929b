#pragma once

#include <stdexcept>
#include <string>

namespace hsat {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid sizes, tolerances or other configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation (non-real input to
/// the conjugate function, non-positive modulus, zero symbol, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A singular atom sits exactly on a grid node.
class GridError : public Error {
public:
    GridError(const std::string& what, int suggested_m)
        : Error(what), suggested_m_(suggested_m) {}
    int suggested_grid_exponent() const noexcept { return suggested_m_; }

private:
    int suggested_m_;
};

/// Point evaluation at a singularity of an inner factor.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Hypotheses of a theorem-backed construction are not met.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// The grid is too coarse for the requested analysis.
class ResolutionError : public Error {
public:
    ResolutionError(const std::string& what, int required_m)
        : Error(what), required_m_(required_m) {}
    int required_grid_exponent() const noexcept { return required_m_; }

private:
    int required_m_;
};

/// A lemma cannot be applied (its hypothesis fails at grid resolution).
class InapplicableError : public Error {
public:
    using Error::Error;
};

/// Malformed spec file. `pointer` is a JSON pointer to the offending field.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::string pointer)
        : Error(what + " (at " + (pointer.empty() ? std::string("/") : pointer) + ")"),
          pointer_(std::move(pointer)) {}
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

}  // namespace hsat
