#pragma once

#include "gerf/core.hpp"

namespace gerf {

/// Phi_{p,sigma}(x) = int_0^x exp(-(t/sigma)^p) dt for x >= 0.
///
/// Evaluated through the lower incomplete gamma function,
/// Phi = (sigma/p) * gamma(1/p, (x/sigma)^p), which is accurate to ~1e-15
/// relative and bounded above by sigma * Gamma(1/p) / p.
double phi(double x, double p, double sigma);

/// J(x) = sum_j Phi(|x_j|) for GERF; the matching scalar penalty for baselines
/// (||x||_1, sum (|x_j| + eps)^p - eps^p, sum (a+1)|x_j| / (a + |x_j|)).
double penalty_value(const Vector& x, const PenaltySpec& spec);

/// Per-coordinate IRL1 weight, i.e. the derivative of the scalar penalty at |x|.
double irl1_weight(double x, const PenaltySpec& spec);
Vector irl1_weights(const Vector& x, const PenaltySpec& spec);

/// Subgradient of the convex remainder in J = ||x||_1 - H(x):
/// sign(x_j) * (1 - exp(-(|x_j|/sigma)^p)).
Vector dc_gradient(const Vector& x, double p, double sigma);

struct LimitDiagnostics {
  double l1_ratio;  ///< J / ||x||_1, tends to 1 as sigma -> inf and to 1/e as p -> 0
  double l0_ratio;  ///< (J / sigma) / (Gamma(1/p)/p * ||x||_0), tends to 1 as sigma -> 0
};

LimitDiagnostics limit_diagnostics(const Vector& x, double p, double sigma);

/// Bundles a penalty with the absolute tolerance its Phi evaluations honour.
class PenaltyEvaluator {
 public:
  explicit PenaltyEvaluator(PenaltySpec spec, double quad_tol = 1e-12);

  const PenaltySpec& spec() const { return spec_; }
  double quad_tol() const { return quad_tol_; }

  double value(const Vector& x) const { return penalty_value(x, spec_); }
  double weight(double x) const { return irl1_weight(x, spec_); }

 private:
  PenaltySpec spec_;
  double quad_tol_;
};

}  // namespace gerf
