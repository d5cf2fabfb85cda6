#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpid {

// Base for all errors raised by the toolkit.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OverflowError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

struct DegenerateError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IOError : Error {
  using Error::Error;
};

// Raised by the pivoted QR when a pivot norm vanishes in the working format.
// Carries the number of completed steps and the pivot vector at the time of
// failure so sweeps can report where the factorization broke.
struct UnderflowError : Error {
  UnderflowError(const std::string& what, std::size_t completed,
                 std::vector<std::size_t> partial_piv)
      : Error(what), completed_steps(completed), piv(std::move(partial_piv)) {}

  std::size_t completed_steps;
  std::vector<std::size_t> piv;  // 0-based, always a permutation of 0..n-1
};

struct ParseError : Error {
  ParseError(const std::string& what, std::size_t line_or_offset)
      : Error(what), location(line_or_offset) {}

  std::size_t location;
};

}  // namespace mpid
