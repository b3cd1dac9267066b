#include <doctest.h>

#include "properties.hpp"

// Reduced sizes; the acceptance binary runs the full suite.

namespace {

void check(const props::Outcome& o) {
  INFO(o.name << ": " << o.first_failure);
  CHECK(o.cases > 0);
  CHECK(o.failures == 0);
}

}  // namespace

TEST_CASE("penalty properties") {
  check(props::penalty_concavity(200));
  check(props::penalty_subadditivity(200));
  check(props::penalty_symmetry(200));
  check(props::limit_diagnostics());
  check(props::alzer_sandwich());
}

TEST_CASE("prox properties") {
  check(props::prox_grid_certificate(300));
  check(props::lambert_vs_newton(1000));
}

TEST_CASE("solver properties") {
  check(props::admm_vs_oracle(4));
  check(props::dca_monotone(5));
}

TEST_CASE("imaging and harness properties") {
  check(props::imaging_adjointness(10));
  check(props::oracle_mse_vs_inverse(20));
  check(props::csv_reproducible());
}
