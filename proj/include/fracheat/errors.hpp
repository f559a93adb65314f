#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the documented domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Gamma function evaluated at a non-positive integer.
class PoleError : public DomainError {
public:
    using DomainError::DomainError;
};

class OverflowError : public Error {
public:
    using Error::Error;
};

/// A series or iteration ran out of budget before meeting its stopping rule.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

/// The requested evaluation points cannot be represented by the spectral grid
/// without aliasing.
class AliasingError : public Error {
public:
    using Error::Error;
};

/// The field does not decay at the boundary of the lattice it lives on.
class DomainTooSmallError : public Error {
public:
    using Error::Error;
};

/// A quantity that is infinite for the requested parameters.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fracheat
