#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvqdyn/core.hpp"

using namespace cvq;

TEST_CASE("grid spacing and lattice points") {
  const auto g = Grid::with_spacing(-1.0, 1.03, 0.1);
  CHECK(g.dx() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(g.x_max >= 1.03);
  CHECK(g.x(0) == -1.0);
  CHECK(g.same_as(Grid(g.x_min, g.x_max, g.n_points)));
  CHECK_FALSE(g.same_as(Grid(g.x_min, g.x_max + 0.1, g.n_points + 1)));
}

TEST_CASE("trapezoid is exact for linear integrands") {
  std::vector<double> f;
  for (int i = 0; i <= 10; ++i) f.push_back(3.0 + 2.0 * i * 0.1);
  CHECK(trapezoid(f, 0.1) == doctest::Approx(3.0 + 1.0).epsilon(1e-14));
}

TEST_CASE("derivative stencils converge at second and fourth order") {
  auto err = [](double dx, Stencil s) {
    const auto g = Grid::with_spacing(0.0, 2 * std::numbers::pi, dx);
    std::vector<cplx> f(g.n_points);
    for (std::size_t i = 0; i < g.n_points; ++i) f[i] = std::sin(g.x(i));
    const auto d = derivative(f, g.dx(), s);
    double e = 0;
    for (std::size_t i = 4; i + 4 < g.n_points; ++i) e = std::max(e, std::abs(d[i] - std::cos(g.x(i))));
    return e;
  };
  const double tri = std::log2(err(0.02, Stencil::Tri) / err(0.01, Stencil::Tri));
  const double penta = std::log2(err(0.04, Stencil::Penta) / err(0.02, Stencil::Penta));
  CHECK(tri == doctest::Approx(2.0).epsilon(0.02));
  CHECK(penta == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("Gaussian packet moments") {
  const GaussianState g{1.5, 0.7, 2.0};
  const auto wf = make_gaussian(Grid::with_spacing(-10, 12, 0.01), g, 1.0);
  const auto m = moments(wf, 1.0, 1.0);
  CHECK(m.norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.mean_x == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(m.mean_p == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(m.var_x == doctest::Approx(0.49).epsilon(1e-12));
  CHECK(m.var_p == doctest::Approx(1.0 / (4 * 0.49)).epsilon(1e-9));
  CHECK(m.uncertainty_product() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(m.skewness) < 1e-10);
}

TEST_CASE("packet must fit inside the grid") {
  try {
    make_gaussian(Grid(-3, 3, 101), GaussianState{0, 1, 0}, 1.0);
    FAIL("expected GridTooNarrow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooNarrow);
  }
  CHECK_THROWS_AS(make_gaussian(Grid(-3, 3, 101), GaussianState{0, -1, 0}, 1.0), Error);
}

TEST_CASE("harmonic uncertainty reduces to the free one for a slow trap") {
  for (double t : {0.1, 1.0, 3.0})
    CHECK(analytic_ho_uncertainty(t, 0.8, 1.3, 1e-5, 1.0) ==
          doctest::Approx(analytic_free_uncertainty(t, 0.8, 1.3, 1.0)).epsilon(1e-8));
  // trap ground state stays minimal
  const double sigma = std::sqrt(1.0 / (2 * 2.0));
  CHECK(analytic_ho_uncertainty(0.9, sigma, 1.0, 2.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("unit systems round-trip") {
  for (const auto& u : {UnitSystem::si(), UnitSystem::natural(), UnitSystem::dimensionless(1e-9, 1e-15)})
    for (auto q : {Quantity::Length, Quantity::Time, Quantity::Mass, Quantity::Energy, Quantity::Momentum})
      CHECK(u.from_si(u.to_si(2.5, q), q) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(UnitSystem::si().hbar() == Constants::hbar);
  CHECK(UnitSystem::natural().hbar() == doctest::Approx(Constants::hbar_c));
  CHECK(UnitSystem::dimensionless().hbar() == 1.0);
}
