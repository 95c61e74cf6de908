#include "kramers/convexifier.hpp"
#include "kramers/error.hpp"
#include "kramers/rng.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace kramers;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double total(const ConvexificationParams& cp, const CutoffFunction& theta, const RingParameters& p,
             const Vector& x) {
  return energy(p, x) + perturbation_W(cp, theta, p, x);
}

}  // namespace

TEST_CASE("cutoff shape") {
  for (int n : {1, 2, 5, 100}) {
    const CutoffFunction theta = build_cutoff(n);
    CHECK(theta.value(0.0) == 1.0);
    CHECK(theta.value(1.0) == 1.0);
    CHECK(theta.value(-0.99) == 1.0);
    CHECK(theta.value(kSqrt2) == 0.0);
    CHECK(theta.value(-1.6) == 0.0);
    double previous = 1.0;
    double lowest = 0.0;
    for (int i = 0; i <= 4000; ++i) {
      const double r = 1.0 + (kSqrt2 - 1.0) * i / 4000.0;
      const double v = theta.value(r);
      CHECK(v <= previous + 1e-15);
      CHECK(theta.first(r) <= 1e-15);
      CHECK(theta.value(-r) == v);
      CHECK(theta.first(-r) == doctest::Approx(-theta.first(r)));
      lowest = std::min(lowest, theta.second(r));
      previous = v;
    }
    CHECK(lowest >= theta.min_second() - 1e-12);
    CHECK(lowest == doctest::Approx(theta.min_second()).epsilon(1e-3));
    CHECK(theta.min_second() > theta.required_floor());
    CHECK(theta.required_floor() == doctest::Approx(-cutoff_curvature_constant() * (1.0 + 1.0 / n)));
  }
  CHECK_THROWS_AS(build_cutoff(0), InvalidArgument);
}

TEST_CASE("cutoff derivatives match finite differences on both sides") {
  const CutoffFunction theta(7);
  const double step = 1e-6;
  for (double r : {1.05, 1.1, 1.2, 1.3, 1.39, 1.41}) {
    for (double s : {1.0, -1.0}) {
      const double x = s * r;
      CHECK((theta.value(x + step) - theta.value(x - step)) / (2 * step) ==
            doctest::Approx(theta.first(x)).epsilon(1e-5));
      CHECK((theta.first(x + step) - theta.first(x - step)) / (2 * step) ==
            doctest::Approx(theta.second(x)).epsilon(1e-5));
    }
  }
}

TEST_CASE("alpha threshold and minimal order") {
  const double a = 2.0 - kSqrt2;
  CHECK(alpha_threshold() == doctest::Approx(1.0 / (3.0 * a * a + 1.0)));
  CHECK(alpha_threshold() == doctest::Approx(0.4927466).epsilon(1e-6));
  for (double alpha : {0.5, 0.55, 0.6, 0.8, 0.99}) {
    const int n = minimal_order(alpha);
    const double s = 3.0 * a * a + 1.0;
    auto ok = [&](int m) { return alpha * (s + 1.0 / m) - 1.0 - 1.0 / m > 0.0; };
    CHECK(ok(n));
    if (n > 1) CHECK_FALSE(ok(n - 1));
  }
  CHECK_THROWS_AS(minimal_order(0.4), PreconditionViolation);
}

TEST_CASE("perturbation bounds hold and the upper one is attained") {
  const ConvexificationParams cp;
  const CutoffFunction theta(cp.n);
  RandomStream rng(41, 0);
  const RingParameters p(6, 2.0, 0.1);
  const auto bounds = perturbation_bounds(cp, 6);
  for (int s = 0; s < 10000; ++s) {
    Vector x(6);
    for (int k = 0; k < 6; ++k) x[k] = 2.5 * rng.normal();
    const double w = perturbation_W(cp, theta, p, x);
    CHECK(w >= bounds[0] - 1e-12);
    CHECK(w <= bounds[1] + 1e-12);
  }
  const Vector peak = Vector::Constant(6, 1.0 / cp.c_alpha_beta());
  CHECK(perturbation_W(cp, theta, p, peak) == doctest::Approx(bounds[1]));
  CHECK(perturbation_W(cp, theta, p, Vector::Constant(6, 10.0)) == doctest::Approx(bounds[0]));
}

TEST_CASE("Hessian of V + W matches finite differences") {
  ConvexificationParams cp;
  cp.n = 3;
  const CutoffFunction theta(cp.n);
  const RingParameters p(3, 2.0, 0.1);
  Vector x(3);
  x << 1.4 / cp.c_alpha_beta(), -1.2 / cp.c_alpha_beta(), 0.3;
  const Matrix hess = hessian_V_plus_W(cp, theta, p, x);
  const double step = 1e-4;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Vector ei = Vector::Zero(3), ej = Vector::Zero(3);
      ei[i] = step;
      ej[j] = step;
      const double fd = (total(cp, theta, p, x + ei + ej) - total(cp, theta, p, x + ei - ej) -
                         total(cp, theta, p, x - ei + ej) + total(cp, theta, p, x - ei - ej)) /
                        (4 * step * step);
      CHECK(fd == doctest::Approx(hess(i, j)).epsilon(1e-4).scale(1.0));
    }
  }
}

TEST_CASE("Hessian floor at alpha = 0.6, beta = 0.1, n = 100") {
  FloorSweep sweep;
  sweep.samples_per_size = 200;
  sweep.grid_points = 10000;
  const auto cert = hessian_floor(ConvexificationParams{}, 2.0, sweep);
  CHECK(cert.certified);
  CHECK(cert.one_d_min >= 0.0999);
  CHECK(cert.sampled_min >= 0.0999);
}

TEST_CASE("floors equal beta along the log-Sobolev choice") {
  for (double delta : {0.1, 0.8}) {
    const auto b = logsob_lower_bound(delta, 0.1);
    CHECK(b.chosen.alpha > alpha_threshold());
    CHECK(b.oscillation_rate <= b.target_rate + 1e-15);
    CHECK(b.hessian_floor >= b.chosen.beta * (1.0 - 1e-3));
    CHECK(b.bound >= b.target_bound);
    CHECK(b.bound == doctest::Approx(b.hessian_floor * std::exp(-b.oscillation_rate / 0.1)));
  }
}
