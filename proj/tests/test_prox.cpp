#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gerf/prox.hpp"
#include "gerf/rng.hpp"

using namespace gerf;

namespace {

// argmin over the grid u = k |x| / n of (u - |x|)^2 / (2 mu) + Phi(u), with Phi
// accumulated by the trapezoid rule on the same grid.
double grid_minimizer(double x, double mu, double p, double sigma, int n = 100000) {
  const double ax = std::fabs(x), h = ax / n;
  auto w = [&](double t) { return std::exp(-std::pow(t / sigma, p)); };
  double Phi = 0.0, best_u = 0.0, best = ax * ax / (2.0 * mu);
  for (int k = 1; k <= n; ++k) {
    const double u = k * h;
    Phi += 0.5 * h * (w(u - h) + w(u));
    const double f = (u - ax) * (u - ax) / (2.0 * mu) + Phi;
    if (f < best) {
      best = f;
      best_u = u;
    }
  }
  return std::copysign(best_u, x);
}

}  // namespace

TEST_CASE("soft and hard thresholding") {
  CHECK(soft_threshold(Vector(Eigen::Vector2d(2, -2)), 1.0) == Vector(Eigen::Vector2d(1, -1)));
  const Vector x = Eigen::Vector3d(0.3, -4, 0);
  CHECK(soft_threshold(x, 0.0) == x);
  CHECK(soft_threshold(Vector::Constant(1, 0.5), 1.0)[0] == 0.0);
  CHECK(soft_threshold(x, Vector(Eigen::Vector3d(0.1, 5, 1))).isApprox(Vector(Eigen::Vector3d(0.2, 0, 0))));

  CHECK(hard_threshold(Vector(Eigen::Vector2d(2, -0.5)), 1.0) == Vector(Eigen::Vector2d(2, 0)));
  const Vector nz = Eigen::Vector3d(0.3, -4, 1e-9);
  CHECK(hard_threshold(nz, 0.0) == nz);
  CHECK(hard_threshold(Vector(Eigen::Vector2d(1, -1)), 1.0) == Vector::Zero(2));
}

TEST_CASE("lambert_w0") {
  CHECK(lambert_w0(0.0) == 0.0);
  CHECK(lambert_w0(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lambert_w0(-1.0 / std::numbers::e) == doctest::Approx(-1.0).epsilon(1e-7));
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const double z = -1.0 / std::numbers::e + 20.0 * rng.uniform();
    const double w = lambert_w0(z);
    CHECK(w >= -1.0);
    CHECK(w * std::exp(w) == doctest::Approx(z).epsilon(1e-12).scale(1.0));
  }
  CHECK_THROWS_AS(lambert_w0(-0.5), DomainError);
}

TEST_CASE("prox_gerf below mu returns zero where zero is the global minimizer") {
  for (double p : {0.5, 1.0, 2.0})
    for (double sigma : {1.0, 2.0, 10.0, 100.0}) {
      INFO("p=" << p << " sigma=" << sigma);
      CHECK(prox_gerf({0.8, 1.0, p, sigma}) == 0.0);
      CHECK(grid_minimizer(0.8, 1.0, p, sigma) == 0.0);
    }
}

TEST_CASE("prox_gerf below mu is not always zero") {
  // p = 2, sigma = 0.1: Phi saturates near 0.089 long before u = 0.8, so
  // keeping u = x costs far less than the (0.8)^2 / 2 paid at zero.
  const double u = prox_gerf({0.8, 1.0, 2.0, 0.1});
  CHECK(u > 0.7);
  CHECK(u == doctest::Approx(grid_minimizer(0.8, 1.0, 2.0, 0.1)).epsilon(1e-4));
  const ProxQuery q{0.8, 1.0, 2.0, 0.1};
  CHECK(prox_objective(u, q) < prox_objective(0.0, q));
}

TEST_CASE("prox_gerf regimes") {
  CHECK(std::fabs(prox_gerf({2.0, 1.0, 2.0, 100.0}) - 1.0) <= 1e-3);
  CHECK(std::fabs(prox_gerf({1.5, 1.0, 2.0, 0.1}) - 1.5) <= 1e-2);
  CHECK(prox_gerf({-2.0, 1.0, 2.0, 100.0}) == -prox_gerf({2.0, 1.0, 2.0, 100.0}));
  CHECK(prox_gerf({0.0, 1.0, 2.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(prox_gerf({1.0, 0.0, 2.0, 1.0}), DomainError);
  CHECK_THROWS_AS(prox_gerf({1.0, 1.0, -2.0, 1.0}), DomainError);
}

TEST_CASE("prox_gerf matches the grid oracle") {
  Rng rng(32);
  for (int i = 0; i < 40; ++i) {
    const double x = -4.0 + 8.0 * rng.uniform(), mu = 0.05 + 2.0 * rng.uniform();
    const double p = 1.0 + 2.0 * rng.uniform(), sigma = 0.1 + 3.0 * rng.uniform();
    const ProxQuery q{x, mu, p, sigma};
    const double u = prox_gerf(q), g = grid_minimizer(x, mu, p, sigma);
    INFO("x=" << x << " mu=" << mu << " p=" << p << " sigma=" << sigma << " u=" << u << " grid=" << g);
    CHECK(prox_objective(u, q) <= prox_objective(g, q) + 1e-8);
  }
}

TEST_CASE("prox_gerf_p1") {
  CHECK(prox_gerf_p1(0.5, 1.0, 1.0) == 0.0);
  CHECK(std::fabs(prox_gerf_p1(3.0, 1.0, 1.0) - prox_gerf({3.0, 1.0, 1.0, 1.0})) <= 1e-10);
  CHECK(std::fabs(prox_gerf_p1(-3.0, 1.0, 1.0) - prox_gerf({-3.0, 1.0, 1.0, 1.0})) <= 1e-10);
  CHECK(std::fabs(prox_gerf_p1(0.7, 1e-8, 1.0) - 0.7) <= 1e-6);
  // Stationarity of the nonzero branch: (u - x) / mu + exp(-u / sigma) = 0.
  const double u = prox_gerf_p1(3.0, 1.0, 1.0);
  CHECK((u - 3.0) + std::exp(-u) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}
