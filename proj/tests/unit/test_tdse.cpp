#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "cvqdyn/tdse.hpp"

using namespace cvq;

namespace {

double norm_sq(const std::vector<cplx>& v) {
  double s = 0;
  for (auto z : v) s += std::norm(z);
  return s;
}

}  // namespace

TEST_CASE("banded Crank-Nicolson step equals a dense solve") {
  for (auto st : {Stencil::Tri, Stencil::Penta}) {
    const Grid g(-4, 4, 41);
    const auto V = PotentialGrid::sample(g, [](double x) { return 0.3 * x * x + 0.1 * x; });
    const auto sys = build_system(g, V, 1.0, 0.05, st, 1.0);
    const std::size_t n = g.n_points;
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n - 2, n - 2);
    for (std::size_t j = 1; j + 1 < n; ++j) {
      std::vector<cplx> e(n, 0.0);
      e[j] = 1.0;
      const auto h = sys.apply_hamiltonian(e);
      for (std::size_t i = 1; i + 1 < n; ++i) H(i - 1, j - 1) = h[i];
    }
    CHECK((H - H.adjoint()).norm() < 1e-12);
    Eigen::VectorXcd psi(n - 2);
    for (std::size_t i = 0; i < n - 2; ++i) psi[i] = cplx(std::cos(0.3 * i), std::sin(0.7 * i)) * double(i % 5 + 1);
    const cplx h(0.0, 0.05 / 2.0);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n - 2, n - 2);
    const Eigen::VectorXcd ref = (I + h * H).partialPivLu().solve((I - h * H) * psi);
    std::vector<cplx> v(n, 0.0);
    for (std::size_t i = 0; i < n - 2; ++i) v[i + 1] = psi[i];
    sys.step_inplace(v);
    double d = 0;
    for (std::size_t i = 0; i < n - 2; ++i) d = std::max(d, std::abs(v[i + 1] - ref[i]));
    CHECK(d < 1e-12);
    CHECK(v.front() == cplx(0));
    CHECK(v.back() == cplx(0));
  }
}

TEST_CASE("Cayley evolution conserves norm and energy") {
  const auto g = Grid::with_spacing(-15, 15, 0.05);
  const auto V = PotentialGrid::sample(g, [](double x) { return 0.5 * x * x; });
  const auto sys = build_system(g, V, 1.0, 0.01, Stencil::Penta, 1.0);
  const auto psi0 = make_gaussian(g, GaussianState{2.0, 0.6, 0.5}, 1.0);
  const double n0 = norm_sq(psi0.psi), e0 = energy(sys, psi0);
  const auto psi = evolve(psi0, sys, 2000);
  CHECK(psi.time == doctest::Approx(20.0));
  CHECK(std::abs(norm_sq(psi.psi) / n0 - 1) < 1e-11);
  CHECK(std::abs(energy(sys, psi) / e0 - 1) < 1e-11);
}

TEST_CASE("observer sees every cadence-th step") {
  const Grid g(-10, 10, 201);
  const auto sys = build_system(g, PotentialGrid::sample(g, [](double) { return 0.0; }), 1.0, 0.01, Stencil::Tri, 1.0);
  std::vector<std::size_t> seen;
  evolve(make_gaussian(g, GaussianState{0, 1, 0}, 1.0), sys, 10, [&](std::size_t k, const WaveFunction&) { seen.push_back(k); }, 5);
  REQUIRE(seen.size() >= 2);
  CHECK(seen[seen.size() - 1] - seen[seen.size() - 2] == 5);
}

TEST_CASE("cubic interpolation is exact at nodes and for cubics") {
  WaveFunction wf;
  wf.grid = Grid(-2, 2, 81);
  for (std::size_t i = 0; i < wf.grid.n_points; ++i) {
    const double x = wf.grid.x(i);
    wf.psi.push_back(cplx(x * x * x - x, 2 * x * x));
  }
  const auto same = interpolate_cubic(wf, wf.grid);
  for (std::size_t i = 0; i < same.size(); ++i) CHECK(std::abs(same[i] - wf.psi[i]) < 1e-13);
  const Grid shifted(-1.5 + 0.013, 1.5 + 0.013, 57);
  const auto v = interpolate_cubic(wf, shifted);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = shifted.x(i);
    CHECK(std::abs(v[i] - cplx(x * x * x - x, 2 * x * x)) < 1e-12);
  }
}

TEST_CASE("regrid follows the packet and keeps the norm") {
  const auto g = Grid::with_spacing(-8, 8, 0.05);
  auto wf = make_gaussian(g, GaussianState{-0.5, 1.0, 0}, 1.0);
  RegridPolicy pol;
  CHECK_FALSE(needs_regrid(wf, pol));
  wf = make_gaussian(Grid::with_spacing(-8, 8, 0.05), GaussianState{0, 1.0, 0}, 1.0);
  // shift the packet towards the edge by relabelling the grid
  wf.grid = Grid(wf.grid.x_min + 2.5, wf.grid.x_max + 2.5, wf.grid.n_points);
  const auto r = regrid(wf, pol);
  CHECK(r.wf.grid.dx() == doctest::Approx(wf.grid.dx()).epsilon(1e-12));
  CHECK((r.wf.grid.x_min + r.wf.grid.x_max) / 2 == doctest::Approx(2.5).epsilon(0.02));
  CHECK(r.discarded < 1e-12);
  CHECK(norm(r.wf) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(tail_mass(r.wf, 0.05) < 1e-12);
}
