#include <doctest.h>

#include <cmath>

#include "gerf/penalty.hpp"
#include "gerf/rng.hpp"
#include "gerf/special.hpp"
#include "oracles.hpp"

using namespace gerf;

TEST_CASE("special functions against quadrature") {
  CHECK(special::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(special::gamma(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(special::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-14));
  CHECK(special::log_gamma(30.0) == doctest::Approx(std::lgamma(30.0)).epsilon(1e-13));

  for (double a : {0.3, 1.0, 2.5, 10.0})
    for (double z : {0.01, 0.5, 1.0, 3.0, 12.0, 40.0}) {
      // For a < 1, t = s^{1/a} removes the endpoint singularity.
      const double ref =
          (a < 1.0 ? oracle::integrate([&](double s) { return std::exp(-std::pow(s, 1.0 / a)); }, 0.0,
                                       std::pow(z, a), 1e-15) / a
                   : oracle::integrate([&](double t) { return std::pow(t, a - 1.0) * std::exp(-t); }, 0.0, z, 1e-15)) /
          std::tgamma(a);
      INFO("a=" << a << " z=" << z);
      CHECK(special::gamma_p(a, z) == doctest::Approx(ref).epsilon(1e-9));
    }
  CHECK(special::gamma_p(2.0, 0.0) == 0.0);

  CHECK(special::erf_p(1.3, 2.0) == doctest::Approx(std::erf(1.3)).epsilon(1e-13));
  CHECK(special::erf_p(2.0, 1.0) == doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("phi examples") {
  for (double p : {0.5, 1.0, 2.0})
    for (double s : {0.1, 1.0, 10.0}) CHECK(phi(0.0, p, s) == 0.0);
  CHECK(phi(1.0, 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(phi(1.0, 1.0, 1.0) == doctest::Approx(oracle::phi(1.0, 1.0, 1.0)).epsilon(1e-13));
  CHECK(phi(20.0, 2.0, 1.0) == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-14));
  CHECK(oracle::phi(20.0, 2.0, 1.0) == doctest::Approx(std::sqrt(M_PI) / 2.0).epsilon(1e-12));
}

TEST_CASE("phi matches the quadrature oracle on random arguments") {
  Rng rng(21);
  for (int i = 0; i < 300; ++i) {
    const double p = 0.2 + 2.8 * rng.uniform(), s = 0.05 + 5.0 * rng.uniform(), x = 8.0 * s * rng.uniform();
    const double ref = oracle::phi(x, p, s);
    INFO("p=" << p << " sigma=" << s << " x=" << x);
    CHECK(std::fabs(phi(x, p, s) - ref) <= 1e-11 * std::max(1.0, ref));
    CHECK(phi(x, p, s) <= s * std::tgamma(1.0 / p) / p * (1.0 + 1e-14));
  }
}

TEST_CASE("penalty_value examples") {
  const auto g = PenaltySpec::gerf(2.0, 1.0);
  CHECK(penalty_value(Vector::Zero(5), g) == 0.0);
  Vector e = Vector::Zero(4);
  e[2] = -1.7;
  CHECK(penalty_value(e, g) == doctest::Approx(phi(1.7, 2.0, 1.0)).epsilon(1e-15));
  const double ref = 2.0 * oracle::integrate([](double t) { return std::exp(-t * t); }, 0.0, 1.0);
  CHECK(penalty_value(Vector(Eigen::Vector2d(1, -1)), g) == doctest::Approx(ref).epsilon(1e-13));
  CHECK(ref == doctest::Approx(1.49364827).epsilon(1e-8));

  const Vector x = Eigen::Vector3d(1, -2, 0);
  CHECK(penalty_value(x, PenaltySpec::l1()) == 3.0);
  CHECK(penalty_value(x, PenaltySpec::lp(0.5, 1e-12)) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-5));
  CHECK(penalty_value(x, PenaltySpec::tl1(1.0)) == doctest::Approx(2.0 * 1.0 / 2.0 + 2.0 * 2.0 / 3.0));
}

TEST_CASE("irl1_weight examples and finite differences") {
  const auto g1 = PenaltySpec::gerf(1.0, 1.0);
  CHECK(irl1_weight(0.0, g1) == 1.0);
  CHECK(irl1_weight(0.0, PenaltySpec::gerf(2.0, 0.3)) == 1.0);
  CHECK(irl1_weight(1.0, g1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(irl1_weight(-1.0, g1) == irl1_weight(1.0, g1));

  const double h = 1e-5;
  for (const auto& spec : {g1, PenaltySpec::gerf(2.0, 0.5), PenaltySpec::gerf(0.5, 2.0), PenaltySpec::tl1(1.0),
                           PenaltySpec::lp(0.5, 0.1)})
    for (double x : {0.1, 0.5, 2.0}) {
      Vector a(1), b(1);
      a[0] = x + h;
      b[0] = x - h;
      const double fd = (penalty_value(a, spec) - penalty_value(b, spec)) / (2.0 * h);
      INFO(spec.label() << " x=" << x);
      CHECK(std::fabs(fd - irl1_weight(x, spec)) <= 1e-6);
    }

  const Vector x = Eigen::Vector3d(0.0, 1.0, -1.0);
  const Vector w = irl1_weights(x, g1);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == w[2]);
}

TEST_CASE("dc_gradient") {
  CHECK(dc_gradient(Vector::Zero(3), 1.0, 1.0) == Vector::Zero(3));
  CHECK(dc_gradient(Vector::Ones(1), 1.0, 1.0)[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
  Rng rng(22);
  Vector x(20);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
  CHECK(dc_gradient(-x, 1.5, 0.7) == -dc_gradient(x, 1.5, 0.7));
  // l1 minus the DC remainder gives back the GERF weight.
  for (Eigen::Index i = 0; i < x.size(); ++i)
    CHECK(1.0 - std::fabs(dc_gradient(x, 1.5, 0.7)[i]) ==
          doctest::Approx(irl1_weight(x[i], PenaltySpec::gerf(1.5, 0.7))).epsilon(1e-14));
}

TEST_CASE("limit diagnostics") {
  const Vector x = Eigen::Vector3d(1, -2, 3);
  const auto big = limit_diagnostics(x, 2.0, 1e4);
  CHECK(big.l1_ratio >= 0.9999);
  CHECK(big.l1_ratio <= 1.0);
  const auto small = limit_diagnostics(x, 2.0, 1e-4);
  CHECK(small.l0_ratio >= 0.9999);
  CHECK(small.l0_ratio <= 1.0001);
  // p -> 0+: exp(-(t/sigma)^p) -> 1/e pointwise, so the ratio tends to 1/e rather than 1.
  const auto tiny_p = limit_diagnostics(x, 1e-3, 1.0);
  CHECK(tiny_p.l1_ratio == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
  CHECK_THROWS_AS(limit_diagnostics(Vector::Zero(3), 2.0, 1.0), DomainError);
}

TEST_CASE("PenaltyEvaluator forwards to the free functions") {
  const PenaltyEvaluator ev(PenaltySpec::gerf(2.0, 0.5));
  const Vector x = Eigen::Vector3d(0.3, -1.0, 2.0);
  CHECK(ev.value(x) == penalty_value(x, ev.spec()));
  CHECK(ev.weight(0.3) == irl1_weight(0.3, ev.spec()));
  CHECK(ev.quad_tol() == 1e-12);
}
