#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spg/types.hpp"

namespace spg {

struct ValidationCheck {
  std::string name;   // e.g. "followers[0].P_pd"
  bool pass = false;
  std::string detail; // offending eigenvalue / constraint index on failure
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  std::vector<std::string> warnings;
  // Strictly feasible point per follower when the Slater check produced one.
  std::vector<std::optional<Vec>> slater_points;

  bool ok() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const ValidationCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  std::string summary() const;
};

// Checks the standing assumptions: cost matrices (P, Q symmetric, P > 0,
// Q >= 0, P - Q > 0, shared across followers), price weights nonnegative and
// diagonal when square, follower sets nonempty/compact with a Slater point,
// and the leader box nonempty. Dimension mismatches throw DimensionError;
// everything else lands in the report.
ValidationReport validate_game(const PricingGame& game);

}  // namespace spg
