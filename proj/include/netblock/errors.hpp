#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netblock {

// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct ZeroVariance : Error {
  using Error::Error;
};

struct NotPositiveDefinite : Error {
  explicit NotPositiveDefinite(std::size_t pivot_index, const std::string& what)
      : Error(what), pivot(pivot_index) {}
  std::size_t pivot;  // first failing pivot
};

struct NoConvergence : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

// Located parse failure; row/col are 1-based file coordinates.
struct ParseError : Error {
  ParseError(std::size_t r, std::size_t c, const std::string& what)
      : Error(what), row(r), col(c) {}
  std::size_t row;
  std::size_t col;
};

struct LayoutMismatch : Error {
  using Error::Error;
};

struct IncompletePairSet : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct Infeasible : Error {
  using Error::Error;
};

}  // namespace netblock
