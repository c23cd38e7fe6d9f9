#pragma once

#include <stdexcept>
#include <string>

namespace mqopt {

/// Absolute tolerance used by all approximate equality checks.
inline constexpr double kTol = 1e-9;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated an operation precondition (bad argument, out-of-range k, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// An exhaustive routine was asked to run past its instance-size guard.
class SizeGuardError : public Error {
public:
    using Error::Error;
};

/// A set function that must satisfy f(empty) = 0 does not.
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// A fixture cost model has no price for a node the plan DP visited.
class MissingCostError : public Error {
public:
    using Error::Error;
};

/// A workload (or workload file) failed validation; message names the offending path.
class ValidationError : public Error {
public:
    using Error::Error;
};

}  // namespace mqopt
