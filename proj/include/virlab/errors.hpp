#pragma once

#include <stdexcept>
#include <string>

namespace virlab {

/// Base class for all failures raised by the library.
/// Invariant violations and numerical failures are distinct branches so the
/// CLI can map them to different exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A type invariant was violated (bad grid, non-diffeomorphism, tail blowup...).
struct InvariantError : Error {
    using Error::Error;
};

/// An iterative numerical procedure failed to converge.
struct NumericalError : Error {
    using Error::Error;
};

struct StencilError : InvariantError { using InvariantError::InvariantError; };
struct DomainError : InvariantError { using InvariantError::InvariantError; };
struct TailError : InvariantError { using InvariantError::InvariantError; };
struct NotDiffeo : InvariantError { using InvariantError::InvariantError; };
struct NoSite : InvariantError { using InvariantError::InvariantError; };
struct WarpTooLarge : InvariantError { using InvariantError::InvariantError; };
struct OrderConstraint : InvariantError { using InvariantError::InvariantError; };
struct ZeroLength : InvariantError { using InvariantError::InvariantError; };

struct BadBumpChoice : NumericalError { using NumericalError::NumericalError; };
struct NoRoot : NumericalError { using NumericalError::NumericalError; };
struct NoConvergence : NumericalError { using NumericalError::NumericalError; };

struct ConfigError : Error { using Error::Error; };

} // namespace virlab
