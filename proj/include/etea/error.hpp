#ifndef ETEA_ERROR_HPP
#define ETEA_ERROR_HPP

#include <stdexcept>
#include <string>

namespace etea {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform (matrix products, signal lengths).
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A parameter is outside its admissible domain.
class ParameterError : public Error {
public:
  using Error::Error;
};

/// A banded LDL^T factorization met a non-positive pivot.
class NotPositiveDefinite : public Error {
public:
  explicit NotPositiveDefinite(std::size_t pivot)
      : Error("banded factorization: non-positive pivot at row " + std::to_string(pivot) +
              " (matrix is not positive definite)"),
        pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

private:
  std::size_t pivot_;
};

/// An impulse response did not decay within the requested length.
class ResponseTooShort : public Error {
public:
  using Error::Error;
};

} // namespace etea

#endif // ETEA_ERROR_HPP
