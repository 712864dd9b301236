#pragma once

#include <stdexcept>
#include <string>

namespace tvcert {

/// Base for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied data was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The Gram system is too ill-conditioned to be solved reliably.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// The feasibility scan could not resolve the local maxima of |f_v|.
class GridTooCoarse : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidSegment : public Error {
public:
    using Error::Error;
};

class InvalidDims : public Error {
public:
    using Error::Error;
};

}  // namespace tvcert
