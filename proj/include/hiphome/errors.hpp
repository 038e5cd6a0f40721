#pragma once

#include <stdexcept>
#include <string>

namespace hiphome {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A coordinate or tabulated abscissa lies outside its admissible range.
struct DomainError : Error {
  using Error::Error;
};

// An argument violates a precondition (sizes, signs, parity).
struct ArgumentError : Error {
  using Error::Error;
};

// Configuration file or CLI flags are inconsistent or incomplete.
struct ConfigError : Error {
  using Error::Error;
};

// File could not be read, written, or parsed.
struct IoError : Error {
  using Error::Error;
};

// Gram-Schmidt met a raw function that is numerically dependent on the
// span of the previous ones; `index` is the offending raw index.
struct DegeneracyError : Error {
  int index;
  DegeneracyError(int idx, const std::string& what) : Error(what), index(idx) {}
};

// The transverse grid is too coarse for the requested corrector order;
// `residual` is the measured boundary-flux residual that tripped the check.
struct ResolutionError : Error {
  double residual;
  ResolutionError(double r, const std::string& what) : Error(what), residual(r) {}
};

// A linear solve failed or left a residual above tolerance.
struct SolverError : Error {
  using Error::Error;
};

// A configuration is advection-dominated beyond what the unstabilised
// discretisation can represent (mesh Peclet number too large).
struct StabilityError : SolverError {
  double peclet;
  StabilityError(double pe, const std::string& what) : SolverError(what), peclet(pe) {}
};

// Time stepping produced a non-finite state; `step` is the failing index.
struct BlowUpError : SolverError {
  int step;
  BlowUpError(int s, const std::string& what) : SolverError(what), step(s) {}
};

}  // namespace hiphome
