#include "gerf/penalty.hpp"

#include <cmath>
#include <numbers>

#include "gerf/special.hpp"
#include "internal/exp_power.hpp"

namespace gerf {

namespace {

void check_shape(double p, double sigma) {
  if (!(p > 0.0) || !(sigma > 0.0)) throw DomainError("GERF penalty requires p > 0 and sigma > 0");
}

}  // namespace

double phi(double x, double p, double sigma) {
  check_shape(p, sigma);
  if (!(x >= 0.0)) throw DomainError("phi: x must be nonnegative");
  // Closed forms for the two members used most in the solvers.
  if (p == 1.0) return -sigma * std::expm1(-x / sigma);
  if (p == 2.0) return sigma * (0.5 * std::sqrt(std::numbers::pi)) * std::erf(x / sigma);
  return sigma * special::detail::exp_power_integral(x / sigma, p);
}

double penalty_value(const Vector& x, const PenaltySpec& spec) {
  struct Visitor {
    const Vector& x;
    double operator()(const penalties::Gerf& g) const {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < x.size(); ++j) sum += phi(std::fabs(x[j]), g.p, g.sigma);
      return sum;
    }
    double operator()(const penalties::L1&) const { return x.lpNorm<1>(); }
    double operator()(const penalties::Lp& l) const {
      double sum = 0.0;
      const double base = std::pow(l.eps, l.p);
      for (Eigen::Index j = 0; j < x.size(); ++j) sum += std::pow(std::fabs(x[j]) + l.eps, l.p) - base;
      return sum;
    }
    double operator()(const penalties::TL1& t) const {
      double sum = 0.0;
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double ax = std::fabs(x[j]);
        sum += (t.a + 1.0) * ax / (t.a + ax);
      }
      return sum;
    }
  };
  return std::visit(Visitor{x}, spec.kind);
}

double irl1_weight(double x, const PenaltySpec& spec) {
  const double ax = std::fabs(x);
  struct Visitor {
    double ax;
    double operator()(const penalties::Gerf& g) const { return std::exp(-std::pow(ax / g.sigma, g.p)); }
    double operator()(const penalties::L1&) const { return 1.0; }
    double operator()(const penalties::Lp& l) const { return l.p * std::pow(ax + l.eps, l.p - 1.0); }
    double operator()(const penalties::TL1& t) const { return t.a * (t.a + 1.0) / ((t.a + ax) * (t.a + ax)); }
  };
  return std::visit(Visitor{ax}, spec.kind);
}

Vector irl1_weights(const Vector& x, const PenaltySpec& spec) {
  Vector w(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) w[j] = irl1_weight(x[j], spec);
  return w;
}

Vector dc_gradient(const Vector& x, double p, double sigma) {
  check_shape(p, sigma);
  Vector v(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double ax = std::fabs(x[j]);
    // -expm1 keeps 1 - exp(-t) accurate for tiny t.
    const double mag = -std::expm1(-std::pow(ax / sigma, p));
    v[j] = x[j] > 0.0 ? mag : (x[j] < 0.0 ? -mag : 0.0);
  }
  return v;
}

LimitDiagnostics limit_diagnostics(const Vector& x, double p, double sigma) {
  check_shape(p, sigma);
  const double l1 = x.lpNorm<1>();
  if (l1 == 0.0) throw DomainError("limit_diagnostics: x must be nonzero");
  const double support = static_cast<double>((x.array() != 0.0).count());
  const double J = penalty_value(x, PenaltySpec::gerf(p, sigma));
  // Gamma(1/p) / p == Gamma(1 + 1/p)
  return {J / l1, (J / sigma) / (special::gamma(1.0 + 1.0 / p) * support)};
}

PenaltyEvaluator::PenaltyEvaluator(PenaltySpec spec, double quad_tol) : spec_(std::move(spec)), quad_tol_(quad_tol) {
  if (!(quad_tol_ > 0.0)) throw DomainError("PenaltyEvaluator: quad_tol must be positive");
}

}  // namespace gerf
