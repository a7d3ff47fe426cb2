#pragma once

#include <stdexcept>
#include <string>

namespace hwidths {

/// Base of all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad inputs: unstable systems, dimension mismatches, out-of-range orders.
/// The CLI maps these to exit code 2.
struct DomainError : Error {
    using Error::Error;
};

/// Malformed files or JSON. CLI exit code 3.
struct ParseError : Error {
    using Error::Error;
};

/// Iterative algorithm failures and overflow. CLI exit code 4.
struct NumericalError : Error {
    using Error::Error;
};

struct NonConvergence : NumericalError {
    using NumericalError::NumericalError;
};

struct Overflow : NumericalError {
    using NumericalError::NumericalError;
};

struct NotSymmetric : DomainError {
    using DomainError::DomainError;
};

struct Singular : DomainError {
    using DomainError::DomainError;
};

struct Unstable : DomainError {
    using DomainError::DomainError;
};

struct DimensionMismatch : DomainError {
    using DomainError::DomainError;
};

struct BadParameter : DomainError {
    using DomainError::DomainError;
};

struct BadOrder : DomainError {
    using DomainError::DomainError;
};

struct IndexOutOfRange : DomainError {
    using DomainError::DomainError;
};

struct ZeroSingularValue : DomainError {
    using DomainError::DomainError;
};

struct DegenerateGamma : DomainError {
    using DomainError::DomainError;
};

struct SylvesterSingular : DomainError {
    using DomainError::DomainError;
};

struct AllPointsUnstable : DomainError {
    using DomainError::DomainError;
};

struct NearNonMinimal : DomainError {
    using DomainError::DomainError;
};

} // namespace hwidths
