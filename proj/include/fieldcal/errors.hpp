#ifndef FIELDCAL_ERRORS_HPP
#define FIELDCAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fieldcal {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite data passed to an operation.
struct InvalidInput : Error {
  using Error::Error;
};

// Coefficient selection incompatible with the field dimensions.
struct InvalidSelection : Error {
  using Error::Error;
};

// Bad configuration or hyperparameter values.
struct InvalidConfig : Error {
  using Error::Error;
};

// Basis function referencing predictors outside the design.
struct InvalidBasis : Error {
  using Error::Error;
};

// Grid factors that do not divide the fine grid.
struct InvalidGeometry : Error {
  using Error::Error;
};

// Numerically non-positive-definite system; callers treat the state as
// having log density -inf rather than aborting.
struct DegenerateState : Error {
  using Error::Error;
};

// Operation on an empty posterior store.
struct EmptyStore : Error {
  using Error::Error;
};

}  // namespace fieldcal

#endif  // FIELDCAL_ERRORS_HPP
