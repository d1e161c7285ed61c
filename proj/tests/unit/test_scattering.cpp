#include <doctest.h>

#include <cmath>

#include "cvqdyn/scattering.hpp"

using namespace cvq;

namespace {

CollisionConfig gold(double L = 1e4, double sigma = 10) {
  CollisionConfig c;
  c.L = L;
  c.T0 = 5;
  c.sigma = sigma;
  return c;
}

}  // namespace

TEST_CASE("classical Coulomb kinematics") {
  const auto c = gold();
  CHECK(c.E0() == doctest::Approx(5 + c.coupling() / 1e4));
  CHECK(c.d_cl() == doctest::Approx(45.29676637).epsilon(1e-9));
  CHECK(c.sigma_optimal() == doctest::Approx(71.487044).epsilon(1e-7));
  const auto turn = classical_trajectory(c, c.tau_cl());
  CHECK(turn.x == doctest::Approx(-c.d_cl()).epsilon(1e-9));
  CHECK(std::abs(turn.p) < 1e-6 * c.p0());
  for (double s : {50.0, 300.0, 900.0}) {
    const auto a = classical_trajectory(c, c.tau_cl() - s), b = classical_trajectory(c, c.tau_cl() + s);
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-10));
    CHECK(a.p == doctest::Approx(-b.p).epsilon(1e-10));
    // energy along the orbit
    CHECK(a.p * a.p / (2 * c.m) + c.coupling() / std::abs(a.x) == doctest::Approx(c.E0()).epsilon(1e-10));
  }
  const auto start = classical_trajectory(c, 0.0);
  CHECK(start.x == doctest::Approx(-1e4).epsilon(1e-9));
  CHECK(start.p == doctest::Approx(c.p0()).epsilon(1e-9));
}

TEST_CASE("action length solves the orbit equation") {
  // dG/du = 1 / sqrt(1 - d/u), the inverse radial speed in units of v
  const double d = 45.0, u = 400.0, h = 1e-4;
  const double dG = (classical_action_length(u + h, d) - classical_action_length(u - h, d)) / (2 * h);
  CHECK(dG == doctest::Approx(1.0 / std::sqrt(1.0 - d / u)).epsilon(1e-8));
  CHECK(classical_action_length(d, d) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(classical_action_length(40.0, d), Error);
}

TEST_CASE("Jensen force ratio at the optimal spread") {
  auto c = gold(5e4);
  c.sigma = c.sigma_optimal();
  CHECK(jensen_force_ratio(c) == doctest::Approx(1.000030663951).epsilon(1e-11));
  // convexity of 1/x^2 keeps the average force above the pointwise one
  c.sigma *= 3;
  CHECK(jensen_force_ratio(c) > 1.0002);
}

TEST_CASE("WKB exponent against the closed-form integral") {
  const auto c = gold();
  const double d = c.d_cl(), z = c.l / d;
  const double closed = std::sqrt(2 * c.m * c.E0()) * d * (std::acos(std::sqrt(z)) - std::sqrt(z * (1 - z)));
  CHECK(wkb_action_integral(c) == doctest::Approx(closed).epsilon(1e-10));
  CHECK(wkb_action_integral(c) == doctest::Approx(2069.3532770959).epsilon(1e-10));
  CHECK(wkb_tunneling(c) == doctest::Approx(8.809027e-10).epsilon(1e-6));
  auto hot = c;
  hot.T0 = 200;
  CHECK_THROWS_AS(wkb_action_integral(hot), Error);
}

TEST_CASE("classical crossing probability is the momentum tail above p_lim") {
  const auto c = gold();
  const double plim = classical_crossing_limit(c);
  CHECK(plim * plim / (2 * c.m) == doctest::Approx(c.coupling() * (1 / c.l - 1 / c.L)).epsilon(1e-12));
  // momentum spread hbar / 2 sigma
  const double dp = c.hbar_c / (2 * c.sigma);
  CHECK(classical_crossing_probability(c) == doctest::Approx(0.5 * std::erfc((plim - c.p0()) / (std::sqrt(2.0) * dp))).epsilon(1e-10));
  CHECK(classical_crossing_probability(c) == doctest::Approx(5.286660e-12).epsilon(1e-5));
  auto wide = c;
  wide.sigma = 1.0;
  CHECK(classical_crossing_probability(wide) > classical_crossing_probability(c));
}

TEST_CASE("invalid collisions are rejected") {
  auto c = gold();
  c.T0 = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = gold();
  c.sigma = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("short quantum collision") {
  auto c = gold(2000, 40);
  SolverOptions o;
  o.dx = 0.2;
  o.dt = 1.0;
  o.record_series = true;
  const auto r = quantum_collision(c, o);
  CHECK(r.d_cl == doctest::Approx(c.d_cl()));
  CHECK(r.d_qm > r.d_cl);
  CHECK(r.bound_ok);
  CHECK(r.peak_energy_error < 1e-8);
  CHECK(r.tau_qm == doctest::Approx(r.tau_cl).epsilon(0.05));
  REQUIRE(!r.series.empty());
  CHECK(r.series.front().mean_x == doctest::Approx(-2000).epsilon(1e-6));
}

TEST_CASE("colliding packets map to the relative problem") {
  auto c = gold(1000, 40);
  c.Z_T = 2;
  c.m = 3727.3794066;
  SolverOptions o;
  o.record_series = false;
  const auto r = colliding_packets(c, o);
  CHECK(r.relative.m == doctest::Approx(c.m / 2));
  CHECK(r.relative.L == doctest::Approx(2 * c.L));
  CHECK(r.relative.sigma == doctest::Approx(c.sigma * std::sqrt(2.0)));
  CHECK(r.relative_optimal_width == doctest::Approx(r.projectile_optimal_width * std::sqrt(2.0)));
  CHECK(r.com_momentum == doctest::Approx(0.0));
  CHECK(r.report.d_qm > r.report.d_cl);
}
