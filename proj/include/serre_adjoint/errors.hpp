#pragma once

#include <stdexcept>
#include <string>

namespace serre {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (bad weight, odd Bernoulli index, malformed recipe, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A computation could not be carried out with the data available.
class ComputationError : public Error {
public:
    using Error::Error;
};

class PrecisionExhausted : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class DivergentRegime : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class UnsupportedSpace : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class NotInSpace : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class QuadratureNotConverged : public ComputationError {
public:
    using ComputationError::ComputationError;
};

}  // namespace serre
