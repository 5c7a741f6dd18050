#pragma once

#include <stdexcept>
#include <string>

namespace sparsedom {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A cube did not line up with the cell lattice of a window.
struct MisalignmentError : Error {
  using Error::Error;
};

/// A subdivision or refinement would exceed the finest supported lattice.
struct ResolutionFloorError : Error {
  using Error::Error;
};

/// An operation that requires a nonnegative function saw a negative cell.
struct NegativityError : Error {
  using Error::Error;
};

/// A weight had a cell value <= 0.
struct NonpositiveWeightError : Error {
  using Error::Error;
};

/// The Dini integral of a modulus failed to Cauchy-converge.
struct DiniDivergenceError : Error {
  using Error::Error;
};

/// A cube fell outside the supported scale range of the shifted grids.
struct ScaleRangeError : Error {
  using Error::Error;
};

/// An iterative solver did not reach its stopping rule.
struct ConvergenceError : Error {
  using Error::Error;
};

/// An evaluation point lay outside the declared scope cube.
struct ScopeError : Error {
  using Error::Error;
};

/// An operation-specific precondition was violated.
struct PreconditionError : Error {
  using Error::Error;
};

/// A malformed configuration; carries the offending field name.
struct ConfigError : Error {
  ConfigError(const std::string& field, const std::string& what)
      : Error("config error: field '" + field + "': " + what), field(field) {}
  std::string field;
};

/// A serialized artifact failed to parse.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace sparsedom
