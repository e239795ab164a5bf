#pragma once

#include <stdexcept>
#include <string>

namespace ibclab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Requested basis would exceed the configured entry budget.
struct CapacityError : Error {
  using Error::Error;
};

/// Operands live on different grids/bases or have incompatible sizes.
struct ShapeError : Error {
  using Error::Error;
};

/// Robin coefficients violate the admissibility constraints.
struct AdmissibilityError : Error {
  using Error::Error;
};

/// An iterative solver did not reach its tolerance.
struct ConvergenceError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace ibclab
