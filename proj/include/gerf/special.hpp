#pragma once

namespace gerf::special {

/// Gamma function for x > 0 (Lanczos, g = 7, 9 terms; relative error ~1e-15).
double gamma(double x);
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, z) for a > 0, z >= 0.
double gamma_p(double a, double z);

/// Generalized error function erf_p(x) = p / Gamma(1/p) * int_0^x exp(-t^p) dt, x >= 0.
double erf_p(double x, double p);

}  // namespace gerf::special
