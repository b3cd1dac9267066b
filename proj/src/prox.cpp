#include "gerf/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gerf/penalty.hpp"

namespace gerf {

Vector soft_threshold(const Vector& x, double t) {
  if (!(t >= 0.0)) throw DomainError("soft_threshold: negative threshold");
  Vector out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double mag = std::fabs(x[j]) - t;
    out[j] = mag > 0.0 ? std::copysign(mag, x[j]) : 0.0;
  }
  return out;
}

Vector soft_threshold(const Vector& x, const Vector& t) {
  if (t.size() != x.size()) throw ContractError("soft_threshold: threshold length mismatch");
  if ((t.array() < 0.0).any()) throw DomainError("soft_threshold: negative threshold");
  Vector out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double mag = std::fabs(x[j]) - t[j];
    out[j] = mag > 0.0 ? std::copysign(mag, x[j]) : 0.0;
  }
  return out;
}

Vector hard_threshold(const Vector& x, double t) {
  if (!(t >= 0.0)) throw DomainError("hard_threshold: negative threshold");
  Vector out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) out[j] = std::fabs(x[j]) > t ? x[j] : 0.0;
  return out;
}

double lambert_w0(double z) {
  constexpr double kBranch = -1.0 / std::numbers::e;
  if (std::isnan(z)) throw DomainError("lambert_w0: NaN argument");
  if (z < kBranch) {
    if (kBranch - z <= 4.0 * std::numeric_limits<double>::epsilon()) return -1.0;
    throw DomainError("lambert_w0: argument below -1/e");
  }
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;

  const double p = std::sqrt(std::max(0.0, 2.0 * (std::numbers::e * z + 1.0)));
  // Branch-point series in p = sqrt(2(ez + 1)).
  const double series = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
  if (p < 1e-3) return series;

  double w;
  if (p < 0.5) {
    w = series;
  } else if (z < 3.0) {
    w = std::log1p(z);
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    const double dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= dw;
    if (std::fabs(dw) <= 1e-15 * (1.0 + std::fabs(w))) break;
  }
  return w;
}

double prox_objective(double u, const ProxQuery& q) {
  const double d = u - q.x;
  return d * d / (2.0 * q.mu) + phi(std::fabs(u), q.p, q.sigma);
}

namespace {

void validate(const ProxQuery& q) {
  if (!(q.mu > 0.0)) throw DomainError("prox: mu must be positive");
  if (!(q.p > 0.0) || !(q.sigma > 0.0)) throw DomainError("prox: p and sigma must be positive");
  if (!std::isfinite(q.x)) throw DomainError("prox: x must be finite");
}

// Largest |d/du exp(-(u/sigma)^p)| over u >= 0.
double max_weight_slope(double p, double sigma) {
  if (p < 1.0) return std::numeric_limits<double>::infinity();
  if (p == 1.0) return 1.0 / sigma;
  const double r = (p - 1.0) / p;
  return (p / sigma) * std::pow(r, (p - 1.0) / p) * std::exp(-r);
}

// Residual of the optimality condition for u > 0, x > 0:
// g(u) = u - x + mu exp(-(u/sigma)^p); f'(u) = g(u) / mu.
struct Residual {
  double x, mu, p, sigma;

  double weight(double u) const { return std::exp(-std::pow(u / sigma, p)); }
  double value(double u) const { return u - x + mu * weight(u); }
  double slope(double u) const {
    if (u == 0.0) {
      if (p < 1.0) return -std::numeric_limits<double>::infinity();
      return p == 1.0 ? 1.0 - mu / sigma : 1.0;
    }
    return 1.0 - mu * (p / sigma) * std::pow(u / sigma, p - 1.0) * weight(u);
  }
};

double bisect_slope_zero(const Residual& g, double lo, double hi) {
  const bool lo_negative = g.slope(lo) < 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((g.slope(mid) < 0.0) == lo_negative) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Root of g on [lo, hi] with g(lo) < 0 <= g(hi); safeguarded Newton.
double bracketed_root(const Residual& g, double lo, double hi) {
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gu = g.value(u);
    if (gu == 0.0) return u;
    if (gu < 0.0) lo = u; else hi = u;
    const double d = g.slope(u);
    double next = (d != 0.0 && std::isfinite(d)) ? u - gu / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - u) <= 1e-16 * std::max(1.0, u) || hi - lo <= 1e-16 * std::max(1.0, hi)) return next;
    u = next;
  }
  throw NumericalError("prox_gerf: root finder did not converge (x=" + std::to_string(g.x) + ", mu=" +
                       std::to_string(g.mu) + ", p=" + std::to_string(g.p) + ", sigma=" +
                       std::to_string(g.sigma) + ", bracket=[" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "])");
}

constexpr double kTieTolerance = 1e-12;
constexpr int kScanIntervals = 64;

}  // namespace

double prox_gerf(const ProxQuery& q) {
  validate(q);
  const double ax = std::fabs(q.x);
  if (ax == 0.0) return 0.0;
  // Zero is globally optimal for |x| <= mu whenever the objective minus its
  // value at 0 is convex in u, i.e. mu * max|w'| <= 1.
  if (ax <= q.mu && q.mu * max_weight_slope(q.p, q.sigma) <= 1.0) return 0.0;

  const Residual g{ax, q.mu, q.p, q.sigma};

  std::vector<double> breaks;
  breaks.reserve(kScanIntervals + 8);
  for (int i = 0; i <= kScanIntervals; ++i) breaks.push_back(ax * i / kScanIntervals);

  // Pieces on which g' is monotone: g is concave before the inflection of the
  // weight (p > 1 only) and convex after it.
  std::vector<std::pair<double, double>> pieces;
  if (q.p > 1.0) {
    const double inflection = q.sigma * std::pow((q.p - 1.0) / q.p, 1.0 / q.p);
    if (inflection < ax) {
      breaks.push_back(inflection);
      pieces = {{0.0, inflection}, {inflection, ax}};
    } else {
      pieces = {{0.0, ax}};
    }
  } else {
    pieces = {{0.0, ax}};
  }
  for (const auto& [lo, hi] : pieces) {
    const double slo = g.slope(lo);
    const double shi = g.slope(hi);
    if ((slo < 0.0) != (shi < 0.0)) breaks.push_back(bisect_slope_zero(g, lo, hi));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  ProxQuery positive = q;
  positive.x = ax;
  double best_u = 0.0;
  double best_obj = prox_objective(0.0, positive);
  double g_lo = g.value(breaks.front());
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const double g_hi = g.value(breaks[i]);
    if (g_lo < 0.0 && g_hi >= 0.0) {
      const double root = g_hi == 0.0 ? breaks[i] : bracketed_root(g, breaks[i - 1], breaks[i]);
      const double obj = prox_objective(root, positive);
      if (obj < best_obj - kTieTolerance) {
        best_obj = obj;
        best_u = root;
      }
    }
    g_lo = g_hi;
  }
  return std::copysign(best_u, q.x) + 0.0;
}

double prox_gerf_p1(double x, double mu, double sigma) {
  const ProxQuery q{x, mu, 1.0, sigma};
  validate(q);
  const double ax = std::fabs(x);
  if (ax == 0.0) return 0.0;
  if (ax <= mu && mu <= sigma) return 0.0;

  // Stationary points solve s e^{-s} = c with s = (|x| - u) / sigma.
  const double c = (mu / sigma) * std::exp(-ax / sigma);
  if (c > 1.0 / std::numbers::e) return 0.0;  // residual positive everywhere: objective increasing
  const double u = ax + sigma * lambert_w0(-c);
  if (!(u > 0.0)) return 0.0;
  const ProxQuery positive{ax, mu, 1.0, sigma};
  if (prox_objective(u, positive) < prox_objective(0.0, positive) - kTieTolerance) return std::copysign(u, x);
  return 0.0;
}

}  // namespace gerf
