#pragma once

#include <stdexcept>
#include <string>

namespace hetfuse {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dimension bookkeeping violation (mismatched or non-subset dim sets).
struct DimensionError : Error {
  using Error::Error;
};

// A canonical object is not a proper density where one is required.
struct ImproperDensityError : Error {
  using Error::Error;
};

// Covariance (or noise) matrix expected to be symmetric positive definite.
struct NotSpdError : Error {
  using Error::Error;
};

// Marginalization would integrate over a flat (information-free) direction.
struct UnobservableEliminationError : Error {
  using Error::Error;
};

struct GraphError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace hetfuse
