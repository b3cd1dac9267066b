#include "gerf/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "gerf/core.hpp"
#include "internal/exp_power.hpp"

namespace gerf::special {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_sum(double xm1) {
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (xm1 + static_cast<double>(i));
  return sum;
}

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-17;
constexpr int kMaxTerms = 100000;

// sum_{n>=0} z^n / ((a+1)...(a+n)); converges quickly when z < a + 1.
double lower_series(double a, double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= z / (a + n);
    sum += term;
    if (term < kEps * sum) return sum;
  }
  throw NumericalError("incomplete gamma series did not converge");
}

// Continued fraction (modified Lentz) for Gamma(a, z) / (exp(-z) z^a).
double upper_fraction(double a, double z) {
  double b = z + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete gamma continued fraction did not converge");
}

}  // namespace

double gamma(double x) {
  if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
  if (x > 171.7) return std::numeric_limits<double>::infinity();
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  // Split the power to avoid overflow of t^(x - 0.5) near the top of the range.
  const double half = std::pow(t, 0.5 * (xm1 + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * lanczos_sum(xm1);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  const double xm1 = x - 1.0;
  const double t = xm1 + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1));
}

double gamma_p(double a, double z) {
  if (!(a > 0.0) || !(z >= 0.0)) throw DomainError("gamma_p: requires a > 0 and z >= 0");
  if (z == 0.0) return 0.0;
  if (z < a + 1.0) return std::exp(a * std::log(z) - z - log_gamma(a + 1.0)) * lower_series(a, z);
  return 1.0 - std::exp(a * std::log(z) - z - log_gamma(a)) * upper_fraction(a, z);
}

double erf_p(double x, double p) {
  if (!(p > 0.0) || !(x >= 0.0)) throw DomainError("erf_p: requires p > 0 and x >= 0");
  return detail::exp_power_integral(x, p) / gamma(1.0 + 1.0 / p);
}

namespace detail {

double exp_power_integral(double t, double p) {
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return gamma(1.0 + 1.0 / p);
  const double a = 1.0 / p;
  const double z = std::pow(t, p);
  // gamma(a, z) = z^a e^{-z} (...), and z^a = t exactly.
  if (z < a + 1.0) return t * std::exp(-z) * lower_series(a, z);
  return gamma(1.0 + a) - t * std::exp(-z) * upper_fraction(a, z) / p;
}

}  // namespace detail

}  // namespace gerf::special
