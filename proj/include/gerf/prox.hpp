#pragma once

#include "gerf/core.hpp"

namespace gerf {

/// Scalar proximal query: argmin_u (u - x)^2 / (2 mu) + Phi_{p,sigma}(|u|).
struct ProxQuery {
  double x;
  double mu;
  double p;
  double sigma;
};

/// sign(x) * max(|x| - t, 0), componentwise.
Vector soft_threshold(const Vector& x, double t);
Vector soft_threshold(const Vector& x, const Vector& t);

/// Keeps entries with |x_j| > t (strict), zeroes the rest.
Vector hard_threshold(const Vector& x, double t);

/// Global minimizer of the GERF proximal objective.
///
/// Every stationary point in (0, |x|] is located by bracketing on monotone
/// pieces of the optimality residual; those candidates and u = 0 are compared
/// by objective value, ties going to the smaller magnitude.
double prox_gerf(const ProxQuery& q);

/// p = 1 path: the nonzero stationary point is |x| + sigma * W0(-(mu/sigma) e^{-|x|/sigma}).
double prox_gerf_p1(double x, double mu, double sigma);

/// Principal branch of the Lambert W function on [-1/e, inf).
double lambert_w0(double z);

/// The scalar objective minimized by prox_gerf.
double prox_objective(double u, const ProxQuery& q);

}  // namespace gerf
