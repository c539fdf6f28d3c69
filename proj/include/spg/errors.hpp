#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spg {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Structural problems: mismatched matrix/vector dimensions, malformed input.
class DimensionError : public Error {
public:
  using Error::Error;
};

// A constraint set turned out to be empty (phase-1 certificate failed).
class InfeasibleError : public Error {
public:
  using Error::Error;
};

// An iterative solver hit its iteration cap. Carries the residual history so
// callers can inspect how close it got.
class NonconvergenceError : public Error {
public:
  NonconvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

// Rank deficiency where full row rank is required (dependent active rows).
class RankError : public Error {
public:
  RankError(const std::string& what, std::vector<std::string> rows = {})
      : Error(what), dependent_rows(std::move(rows)) {}
  std::vector<std::string> dependent_rows;
};

// The candidate point violates its constraints beyond the stated tolerance.
class InfeasiblePointError : public Error {
public:
  using Error::Error;
};

// Stationarity residual of recovered duals is too large: the equilibrium
// handed to the sensitivity stage was not solved tightly enough.
class StaleEquilibriumError : public Error {
public:
  StaleEquilibriumError(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual = 0.0;
};

// Monotonicity of the pseudo-gradient failed (game violates its standing
// positive-definiteness requirements).
class MonotonicityError : public Error {
public:
  using Error::Error;
};

// File/schema problems in game and scenario documents.
class SchemaError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Finite-difference stencil straddles an active-set change.
class UnreliableStencilError : public Error {
public:
  using Error::Error;
};

}  // namespace spg
