#pragma once

#include <stdexcept>
#include <string>

namespace qsched {

/// Base class for every error raised by the scheduler library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition or invariant.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A job does not fit the machine it was asked to run on.
class CapacityError : public Error {
public:
  using Error::Error;
};

/// No bipartition satisfies the requested block-size constraints.
class InfeasibleCut : public Error {
public:
  using Error::Error;
};

/// A job cannot be placed on any machine even after cutting.
class InfeasibleJob : public Error {
public:
  using Error::Error;
};

/// The exhaustive scheduler was handed an instance beyond its bounds.
class InstanceTooLarge : public Error {
public:
  using Error::Error;
};

} // namespace qsched
