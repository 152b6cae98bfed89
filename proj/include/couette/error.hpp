#pragma once

#include <stdexcept>
#include <string>

namespace couette {

/// Base of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejected input: bad sizes, out-of-range parameters, malformed config.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not deliver a trustworthy result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Neumann or lift data violate the solvability condition.
class SolvabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// File-level failures (unreadable, truncated, malformed).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace couette
