#include "kramers/error.hpp"
#include "kramers/gaussian_lab.hpp"
#include "kramers/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kramers;

// Reference values from tests/oracles/oracles.py (mpmath, 30 digits).
constexpr double kP1 = 0.45015815807855303;
constexpr double kP2 = 0.90031631615710607;
constexpr double kP4 = 2.5464790894703254;
constexpr double kP4096 = 4.6199657422130245;
constexpr double kLimitMu2 = 4.6199689819308054;
constexpr double kLimitMu3 = 2.1193514557214886;

TEST_CASE("resolvent diagonal at N = 4, mu = 2, alpha = 0, beta = 2") {
  const RingParameters p(4, 2.0, 0.1);
  const auto op = build_operator(p, 0.0, 2.0);
  const std::vector<double> expected{0.5, 0.25, 1.0 / 6.0, 0.25};
  for (int k = 0; k < 4; ++k) CHECK(op.sigma[k] == doctest::Approx(expected[k]));
  CHECK(op.trace == doctest::Approx(7.0 / 6.0));
  CHECK(op.log_det == doctest::Approx(std::log(2.0 * 4.0 * 6.0 * 4.0)));
}

TEST_CASE("operator preconditions") {
  const RingParameters p(4, 2.0, 0.1);
  CHECK_THROWS_AS(build_operator(p, -1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(build_operator(p, 1.0, -2.5), InvalidArgument);
  CHECK_NOTHROW(build_operator(RingParameters(1, 2.0, 0.1), 3.0, -2.0));
}

TEST_CASE("resolvent and its inverse round trip") {
  RandomStream rng(1, 0);
  for (int n : {1, 3, 8, 13}) {
    const RingParameters p(n, 2.0, 0.1);
    const auto op = build_operator(p, 1.5, 0.5);
    Vector x(n);
    for (int k = 0; k < n; ++k) x[k] = rng.normal();
    CHECK((apply_inverse_resolvent(op, apply_resolvent(op, x)) - x).norm() < 1e-12 * x.norm());
    // Q⁻¹ = alpha P + K + beta
    const Vector direct = 1.5 * project_mean(x) + apply_K(p, x) + 0.5 * x;
    CHECK((apply_inverse_resolvent(op, x) - direct).norm() < 1e-12 * (1 + x.norm()));
  }
}

TEST_CASE("closed-form moments") {
  const RingParameters p(4, 2.0, 0.1);
  const auto op = build_operator(p, 0.0, 2.0);
  const double s = 0.1 * 7.0 / 6.0;  // per-coordinate variance h Tr Q
  CHECK(closed_form_moment(op, p, 4) == doctest::Approx(3.0 * s * s));
  CHECK(closed_form_moment(op, p, 6) == doctest::Approx(15.0 * s * s * s));
  CHECK_THROWS_AS(closed_form_moment(op, p, 5), InvalidArgument);
}

TEST_CASE("sampled covariance matches hN Q") {
  const RingParameters p(4, 2.0, 0.1);
  const auto op = build_operator(p, 0.0, 2.0);
  const auto xs = sample_gaussian(op, p, 200000, 3);
  double c00 = 0, c01 = 0, c02 = 0;
  for (const auto& x : xs) {
    c00 += x[0] * x[0];
    c01 += x[0] * x[1];
    c02 += x[0] * x[2];
  }
  const double n = static_cast<double>(xs.size());
  // Q_jk = (1/N) Σ sigma_k cos(2 pi k (j - l)/N): Q_00 = 7/24, Q_01 = 1/12, Q_02 = 1/24
  CHECK(c00 / n == doctest::Approx(0.4 * 7.0 / 24.0).epsilon(0.02));
  CHECK(c01 / n == doctest::Approx(0.4 / 12.0).epsilon(0.04));
  CHECK(c02 / n == doctest::Approx(0.4 / 24.0).epsilon(0.08));
}

TEST_CASE("samples are reproducible per (seed, stream)") {
  const RingParameters p(8, 2.0, 0.2);
  const auto op = build_operator(p, 1.0, 1.0);
  const auto a = sample_gaussian(op, p, 10, 5, 2);
  const auto b = sample_gaussian(op, p, 10, 5, 2);
  const auto c = sample_gaussian(op, p, 10, 5, 3);
  for (int i = 0; i < 10; ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i] != c[i]);
  }
}

TEST_CASE("tail bound dominates the exact Gaussian tail of the mean") {
  const RingParameters p(6, 2.0, 0.1);
  const auto op = build_operator(p, 2.0, 1.0);
  const double sd = std::sqrt(0.1 / 3.0);  // x̄ ~ N(0, h/(alpha+beta))
  for (double r : {0.2, 0.5, 1.0, 1.5}) {
    const double exact = std::erfc(r / (sd * std::sqrt(2.0)));
    const double bound = tail_bound(op, p, r);
    CHECK(bound >= exact);
    if (r >= 1.0) CHECK(bound / exact < 1.05);
  }
}

TEST_CASE("prefactor values and limit") {
  CHECK(prefactor(RingParameters(1, 2.0, 1.0)).p_n == doctest::Approx(kP1).epsilon(1e-13));
  CHECK(prefactor(RingParameters(2, 2.0, 1.0)).p_n == doctest::Approx(kP2).epsilon(1e-13));
  CHECK(prefactor(RingParameters(4, 2.0, 1.0)).p_n == doctest::Approx(kP4).epsilon(1e-13));
  CHECK(prefactor(RingParameters(4096, 2.0, 1.0)).p_n == doctest::Approx(kP4096).epsilon(1e-11));
  CHECK(prefactor_limit(2.0) == doctest::Approx(kLimitMu2).epsilon(1e-13));
  CHECK(prefactor_limit(3.0) == doctest::Approx(kLimitMu3).epsilon(1e-13));
  // p(1) = sqrt(2)/pi
  CHECK(kP1 == doctest::Approx(std::sqrt(2.0) / std::numbers::pi));
}

TEST_CASE("prefactor gap shrinks monotonically along doubling N") {
  double previous = std::numeric_limits<double>::infinity();
  for (int n = 2; n <= 4096; n *= 2) {
    const auto r = prefactor(RingParameters(n, 2.0, 1.0));
    CHECK(r.gap == doctest::Approx(std::abs(r.p_n - r.limit)));
    CHECK(r.gap < previous);
    previous = r.gap;
  }
}

TEST_CASE("Hessian determinants") {
  const RingParameters p(4, 2.0, 0.1);
  CHECK(log_det_hessian_minimum(p) == doctest::Approx(std::log(192.0)));
  CHECK(log_det_hessian_saddle(p) == doctest::Approx(std::log(3.0)));
}
