#pragma once

#include <stdexcept>
#include <string>

namespace santalo {

// Base class for library failures. The scenario runner maps ConfigError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimension mismatch between potentials, drifts, states, grids, or rules.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// exp(phi) cannot be integrated: overflow, vanishing mass, or a potential
// that grows too fast against the Gaussian weight.
class IntegrabilityError : public Error {
 public:
  using Error::Error;
};

// An operation that requires a centered density was given one whose
// barycenter is significantly nonzero.
class CenteringError : public Error {
 public:
  using Error::Error;
};

// Invalid convex body: too few vertices, not strictly convex, not
// counter-clockwise, or origin outside the interior.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Malformed config file, catalog id, or quadrature rule string.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The potential cannot supply a (sub)gradient at the requested point.
class GradientError : public Error {
 public:
  using Error::Error;
};

// A path simulation produced a non-finite drift or state.
class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace santalo
