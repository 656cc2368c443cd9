#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace conformal {

namespace detail {

/// Short rendering of a number for error messages.
inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

/// Base class for every error raised by the library.
///
/// Each subclass corresponds to one failure family; the CLI maps them onto
/// process exit codes (see tools/conformal_strings.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method (quadrature refinement, Newton, bisection) ran out of budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed textual input (rational literals, cache documents).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A numerical invariant check failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A curve sample landed on (or next to) the projection pole.
class SingularSampleError : public Error {
 public:
  using Error::Error;
};

/// Samples are too coarse for angle accumulation (consecutive points subtend >= pi/2).
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// The conformal arclength degenerates (eta = 0) where a finite value was required.
class VertexError : public Error {
 public:
  using Error::Error;
};

}  // namespace conformal
