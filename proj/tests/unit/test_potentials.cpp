#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvqdyn/potentials.hpp"

using namespace cvq;

namespace {

std::vector<CentralPotentialSpec> zoo() {
  return {CentralPotentialSpec::newtonian(2.0, 5.0, 0.7),
          CentralPotentialSpec::coulomb(2, 79, 3727.4, 1e4, Constants::hbar_c),
          CentralPotentialSpec::coulomb(-1, 1, 1.0, 10.0, 1.0),
          CentralPotentialSpec::generic_potential(0.4, 3.0, 2, 1.5),
          CentralPotentialSpec::generic_force(0.4, 3.0, 1, 1.5),
          CentralPotentialSpec::generic_force(0.4, 3.0, 3, 1.5),
          CentralPotentialSpec::casimir(1.0, 2.0, 2.5, 1.0),
          CentralPotentialSpec::mond(2.0, 5.0, 0.7, 0.01),
          CentralPotentialSpec::composite(
              {CentralPotentialSpec::newtonian(2.0, 5.0, 0.7), CentralPotentialSpec::casimir(1.0, 2.0, 5.0, 1.0)})};
}

double fd(const CentralPotentialSpec& s, int k, double r, double h) {
  auto V = [&](double x) { return potential_value(s, x); };
  switch (k) {
    case 1: return (V(r + h) - V(r - h)) / (2 * h);
    case 2: return (V(r + h) - 2 * V(r) + V(r - h)) / (h * h);
    default: return (V(r + 2 * h) - 2 * V(r + h) + 2 * V(r - h) - V(r - 2 * h)) / (2 * h * h * h);
  }
}

}  // namespace

TEST_CASE("analytic derivatives match finite differences") {
  for (const auto& s : zoo()) {
    const double h = 1e-3 * s.L;
    for (int k = 1; k <= 3; ++k) {
      const double exact = potential_derivative(s, k, 0.01 * s.L);
      // one Richardson step removes the h^2 error
      const double rich = (4 * fd(s, k, 0.01 * s.L, h / 2) - fd(s, k, 0.01 * s.L, h)) / 3;
      CHECK(rich == doctest::Approx(exact).epsilon(1e-5));
    }
  }
}

TEST_CASE("omega squared is minus twice the curvature over the mass") {
  for (const auto& s : zoo()) {
    const auto w = omega_squared(s);
    CHECK(w.value >= 0);
    CHECK(w.signed_value() == doctest::Approx(-2.0 * potential_derivative(s, 2, 0.0) / s.m).epsilon(1e-12));
  }
  CHECK_FALSE(omega_squared(CentralPotentialSpec::coulomb(2, 79, 1, 1e4, 1)).attractive);
  CHECK(omega_squared(CentralPotentialSpec::coulomb(-2, 79, 1, 1e4, 1)).attractive);
  const auto trap = omega_squared(CentralPotentialSpec::harmonic_trap(3.0, 1.0));
  CHECK(trap.value == 9.0);
  CHECK_FALSE(trap.attractive);
}

TEST_CASE("composite coupling adds the members") {
  const auto a = CentralPotentialSpec::newtonian(2.0, 5.0, 0.7);
  const auto b = CentralPotentialSpec::casimir(1.0, 2.0, 5.0, 1.0);
  const auto c = CentralPotentialSpec::composite({a, b});
  CHECK(omega_squared(c).value == doctest::Approx(omega_squared(a).value + omega_squared(b).value).epsilon(1e-14));
  CHECK(potential_value(c, 0.2) == doctest::Approx(potential_value(a, 0.2) + potential_value(b, 0.2)));
  CHECK_THROWS_AS(CentralPotentialSpec::composite({}), Error);
}

TEST_CASE("Taylor expansion reproduces the potential near the origin") {
  for (const auto& s : zoo()) {
    const auto e = expand(s, 4);
    const double r = 1e-3 * s.L;
    const double V = potential_value(s, r), V0 = potential_value(s, 0);
    CHECK(e.evaluate(r) == doctest::Approx(V).epsilon(1e-10));
    CHECK(e.evaluate(r, false) == doctest::Approx(V - V0).epsilon(1e-8));
  }
  CHECK_THROWS_AS(expand(zoo()[0], -1), Error);
}

TEST_CASE("Newtonian force-gradient enhancement") {
  const auto s = CentralPotentialSpec::newtonian(1.0, 40.0, 1.0);
  // V''' / V'' = -3 / L for 1/(L + r), drift -2 p0 t / m
  CHECK(epsilon3(s, 1.0, 1.0, 1.0) == doctest::Approx(6.0 / 40.0).epsilon(1e-14));
  CHECK(epsilon3(s, 0.0, 1.0, 1.0) == 0.0);
  CHECK(epsilon3_from_mean(s, -2.0) == doctest::Approx(6.0 / 40.0));
  // at rest the second-order correction is 12 sigma^2 / L^2 (1 + omega0^2 t^2)
  CHECK(epsilon4(s, 0.0, 1.0, 0.5, 1.0, 2.0) == doctest::Approx(12.0 / 1600.0 * 2.0));
  CHECK(epsilon_n(s, 4, 0.0, 1.0, 0.5, 1.0, 2.0) > 0);
  CHECK_THROWS_AS(epsilon_n(s, 2, 0, 1, 1, 1, 1), Error);
}

TEST_CASE("Casimir requires separated surfaces") {
  CHECK_THROWS_AS(CentralPotentialSpec::casimir(1.0, 1.0, 2.0, 1.0), Error);
  try {
    CentralPotentialSpec::casimir(1.0, 1.0, 1.5, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProximityViolated);
  }
}

TEST_CASE("MOND regime threshold and sphere geometry") {
  const double rho = Constants::density_osmium;
  const double R = 2.5e-7;
  CHECK(sphere_radius(rho, sphere_mass(rho, R)) == doctest::Approx(R).epsilon(1e-14));
  const auto r = mond_regime_check(rho, R, 2.5 * R);
  CHECK(r.threshold == doctest::Approx(std::sqrt(3.0) / (std::sqrt(2.0) - 1.0) *
                                       std::sqrt(std::numbers::pi * Constants::newton_G * rho * R / Constants::mond_a0)));
  CHECK(r.deep_mond == (2.5 > r.threshold));
  CHECK(r.a_N == doctest::Approx(Constants::newton_G * sphere_mass(rho, R) / std::pow(2.5 * R, 2)));
  // deep MOND when the sphere falls below the acceleration scale at contact
  CHECK(mond_regime_check(rho, 1e-9, 1e-6).deep_mond);
  CHECK_FALSE(mond_regime_check(rho, 1e-2, 2.1e-2).deep_mond);
}
