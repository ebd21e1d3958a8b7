#pragma once

#include <stdexcept>
#include <string>

namespace fastcpd {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed numeric text in a point file.
struct ParseError : Error {
  using Error::Error;
};

// Inconsistent or incompatible matrix/point dimensions.
struct DimensionError : Error {
  using Error::Error;
};

// Out-of-range parameter value (beta <= 0, omega >= 1, ...).
struct ParameterError : Error {
  using Error::Error;
};

// Numerical failure (eigensolver non-convergence, singular system).
struct NumericError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace fastcpd
