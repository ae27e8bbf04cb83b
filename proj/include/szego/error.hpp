#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace szego {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// --- amplitude DSL ---

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset)
        : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class UnknownVariable : public Error {
public:
    using Error::Error;
};

/// Evaluation outside a function's domain (log of non-positive, sqrt of negative, x/0, ...).
class DomainError : public Error {
public:
    DomainError(const std::string& what, std::string subexpr)
        : Error(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}
    const std::string& subexpression() const noexcept { return subexpr_; }

private:
    std::string subexpr_;
};

// --- geometry ---

class SingularMetric : public Error {
public:
    using Error::Error;
};

class InconsistentClassification : public Error {
public:
    using Error::Error;
};

/// Raised when an operation needs an isotropic or co-isotropic submanifold.
class NotApplicable : public Error {
public:
    using Error::Error;
};

class EmptyQuadrature : public Error {
public:
    using Error::Error;
};

// --- operators and spectra ---

class DoubleScaling : public Error {
public:
    using Error::Error;
};

class CostLimit : public Error {
public:
    using Error::Error;
};

class NegativeEigenvalue : public Error {
public:
    using Error::Error;
};

class NormalizationError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateSweep : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

// --- Lagrangian states ---

class BohrSommerfeldViolation : public Error {
public:
    using Error::Error;
};

class ZeroState : public Error {
public:
    using Error::Error;
};

// --- configuration ---

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace szego
