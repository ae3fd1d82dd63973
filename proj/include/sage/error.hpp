// SPDX-FileCopyrightText: 2026 sage contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sage {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Field domain has no free cells left after inflation.
struct FieldDomainEmpty : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solve exceeded max_iter; carries the last max-update residual.
struct SolverDiverged : std::runtime_error {
  SolverDiverged(const std::string& what, double residual_)
      : std::runtime_error(what), residual(residual_) {}
  double residual;
};

// Field sample query outside the grid extent.
struct OutOfBounds : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// QP constraint set has no feasible point; carries the largest violation.
struct Infeasible : std::runtime_error {
  Infeasible(const std::string& what, double violation_)
      : std::runtime_error(what), violation(violation_) {}
  double violation;
};

}  // namespace sage
