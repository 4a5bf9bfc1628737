#pragma once

#include <stdexcept>
#include <string>

namespace minsimplex {

// Rank-deficient basis, collapsed projection, or a perturbation that could
// not reach general position. Callers are expected to perturb and retry.
struct DegenerateInputError : std::runtime_error {
  explicit DegenerateInputError(const std::string& what)
      : std::runtime_error(what) {}
};

// Combinatorial enumeration would exceed the configured budget.
struct BudgetExceededError : std::runtime_error {
  explicit BudgetExceededError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace minsimplex
