#pragma once

#include <stdexcept>
#include <string>

namespace dcforge {

/// Base class of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input validation.
class NonSymmetricInput : public Error {
 public:
  using Error::Error;
};
class NotPSD : public Error {
 public:
  using Error::Error;
};
class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class InfeasibleStart : public Error {
 public:
  using Error::Error;
};
class UnsupportedDomain : public Error {
 public:
  using Error::Error;
};

// Transforms.
class HasConstraints : public Error {
 public:
  using Error::Error;
};
class NoConstraints : public Error {
 public:
  using Error::Error;
};

// Solvers.
class Unbounded : public Error {
 public:
  using Error::Error;
};
class InfeasibleSubproblem : public Error {
 public:
  using Error::Error;
};
class MaxIters : public Error {
 public:
  using Error::Error;
};
class MixedCurvature : public Error {
 public:
  using Error::Error;
};

// Analysis.
class UnboundedDomain : public Error {
 public:
  using Error::Error;
};
class InfeasiblePoint : public Error {
 public:
  using Error::Error;
};

// Connections.
class NoSolution : public Error {
 public:
  using Error::Error;
};

}  // namespace dcforge
