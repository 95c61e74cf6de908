#include "kramers/gaussian_lab.hpp"
#include "kramers/quasimode.hpp"
#include "kramers/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kramers;

// tests/oracles/oracles.py (mpmath): Rayleigh quotient of ψ and E(ψ) at N = 1.
constexpr double kDirichletH01 = 0.0340652149338915;
constexpr double kDirichletH005 = 0.0028131790646558;
constexpr double kRatioH01 = 0.921896599571968;
constexpr double kEH01 = 0.0628298250277417;
constexpr double kEH005 = 0.0220112372634139;

namespace {

Vector random_state(int n, RandomStream& rng) {
  Vector x(n);
  for (int k = 0; k < n; ++k) x[k] = 0.3 + 0.6 * rng.normal();
  return x;
}

}  // namespace

TEST_CASE("pointwise quasimode data match finite differences") {
  RandomStream rng(31, 0);
  for (int n : {1, 2, 5}) {
    const RingParameters p(n, 2.0, 0.15);
    const Vector x = random_state(n, rng);
    const Vector g = grad_chi(p, x);
    const double step = 1e-4;
    double laplacian = 0.0;
    for (int k = 0; k < n; ++k) {
      Vector e = Vector::Zero(n);
      e[k] = step;
      CHECK((chi(p, x + e) - chi(p, x - e)) / (2 * step) == doctest::Approx(g[k]).epsilon(1e-6));
      laplacian += (chi(p, x + e) - 2 * chi(p, x) + chi(p, x - e)) / (step * step);
    }
    CHECK(grad_chi_norm_sq(p, x) == doctest::Approx(g.squaredNorm()));
    const double lh = -p.hn() * laplacian + gradient(p, x).dot(g);
    CHECK(apply_Lh_chi(p, x) == doctest::Approx(lh).epsilon(1e-5));
    const auto ev = evaluate_quasimode(p, x);
    CHECK(ev.chi == chi(p, x));
    CHECK(ev.lh_chi == apply_Lh_chi(p, x));
  }
}

TEST_CASE("N = 1 integrals match the oracle") {
  const auto a = quasimode_integrals(RingParameters(1, 2.0, 0.1), IntegrationMethod::quadrature);
  const auto b = quasimode_integrals(RingParameters(1, 2.0, 0.05), IntegrationMethod::quadrature);
  CHECK(a.dirichlet_form == doctest::Approx(kDirichletH01).epsilon(1e-8));
  CHECK(b.dirichlet_form == doctest::Approx(kDirichletH005).epsilon(1e-8));
  CHECK(a.dirichlet_ratio == doctest::Approx(kRatioH01).epsilon(1e-8));
  CHECK(a.e_functional == doctest::Approx(kEH01).epsilon(1e-8));
  CHECK(b.e_functional == doctest::Approx(kEH005).epsilon(1e-8));
  // ∫|L_hψ|² = E·(Rayleigh quotient); the scaling divides by h² sqrt|det ratio| e^{−1/4h}
  const double p1 = prefactor(RingParameters(1, 2.0, 1.0)).p_n;
  CHECK(a.e_scaling ==
        doctest::Approx(kEH01 * kDirichletH01 / (0.01 * std::numbers::pi * p1 * std::exp(-2.5))).epsilon(1e-7));
  CHECK(dirichlet_form_psi(RingParameters(1, 2.0, 0.1), IntegrationMethod::quadrature) ==
        doctest::Approx(kDirichletH01).epsilon(1e-8));
  CHECK(e_functional(RingParameters(1, 2.0, 0.1), IntegrationMethod::quadrature) ==
        doctest::Approx(kEH01).epsilon(1e-8));
}

TEST_CASE("quasimode is centred by antisymmetry") {
  for (int n : {1, 2}) CHECK(std::abs(quasimode_mean(RingParameters(n, 2.0, 0.1))) < 1e-10);
}

TEST_CASE("importance sampling agrees with quadrature at N = 2") {
  const RingParameters p(2, 2.0, 0.1);
  const auto q = quasimode_integrals(p, IntegrationMethod::quadrature);
  IntegrationOptions opts;
  opts.samples = 400000;
  const auto mc = quasimode_integrals(p, IntegrationMethod::importance_mc, opts);
  REQUIRE(mc.dirichlet_ratio_stderr.has_value());
  REQUIRE(mc.e_functional_stderr.has_value());
  CHECK(std::abs(mc.dirichlet_ratio - q.dirichlet_ratio) < 4.0 * *mc.dirichlet_ratio_stderr);
  CHECK(std::abs(mc.e_functional - q.e_functional) < 4.0 * *mc.e_functional_stderr);
}

TEST_CASE("sandwich arithmetic") {
  const auto s = sandwich_bound(0.01, 0.0004, 0.8);
  const double eps = 2.0 * 0.01 / 0.8 + 2.0 / std::sqrt(0.8) * 0.02;
  CHECK(s.epsilon_used == doctest::Approx(eps));
  CHECK(s.lower == doctest::Approx(0.01 * (1.0 - eps)));
  CHECK(s.valid);
  CHECK(s.lower <= s.upper);

  const auto big = sandwich_bound(0.5, 0.0004, 0.8);
  CHECK_FALSE(big.valid);
  const auto clipped = sandwich_bound(0.01, 4.0, 0.8);
  CHECK(clipped.epsilon_used == doctest::Approx(1.0));
  CHECK(clipped.lower == doctest::Approx(0.0));
}
