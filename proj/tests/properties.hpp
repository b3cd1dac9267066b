#pragma once

// Randomized property checks shared by the unit tests and the acceptance run.

#include <cstddef>
#include <string>
#include <vector>

namespace props {

struct Outcome {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;
};

Outcome penalty_concavity(std::size_t cases);
Outcome penalty_subadditivity(std::size_t cases);
Outcome penalty_symmetry(std::size_t cases);
Outcome limit_diagnostics();
Outcome alzer_sandwich();
/// Objective at prox_gerf(q) vs the minimum over {0, |x| k / grid}.
Outcome prox_grid_certificate(std::size_t queries, std::size_t grid = 100000);
Outcome lambert_vs_newton(std::size_t cases);
Outcome admm_vs_oracle(std::size_t instances);
Outcome dca_monotone(std::size_t instances);
Outcome imaging_adjointness(std::size_t cases);
Outcome oracle_mse_vs_inverse(std::size_t cases);
Outcome csv_reproducible();

/// Every property at the sizes used for acceptance.
std::vector<Outcome> full_suite();

}  // namespace props
