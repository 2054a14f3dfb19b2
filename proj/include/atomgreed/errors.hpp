#ifndef ATOMGREED_ERRORS_HPP
#define ATOMGREED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace atomgreed {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An iterative kernel hit its iteration cap. `residual` carries the
// last measured stopping quantity (gradient norm, off-diagonal mass, ...).
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The selection oracle was handed a zero gradient: the iterate is stationary.
class ZeroGradient : public Error {
 public:
  using Error::Error;
};

class NotEnumerable : public Error {
 public:
  using Error::Error;
};

// A combinatorial routine was asked for an instance beyond its size caps.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace atomgreed

#endif  // ATOMGREED_ERRORS_HPP
