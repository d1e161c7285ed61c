#include "cvqdyn/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cvq {

PotentialGrid PotentialGrid::sample(const Grid& grid, const std::function<double(double)>& v) {
  PotentialGrid p;
  p.values.resize(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) p.values[i] = v(grid.x(i));
  return p;
}

BandedSystem::BandedSystem(const Grid& grid, const PotentialGrid& potential, double mass, double dt,
                           Stencil stencil, double hbar)
    : grid_(grid), stencil_(stencil), mass_(mass), dt_(dt), hbar_(hbar), v_(potential.values) {
  if (v_.size() != grid.n_points) throw Error(ErrorCode::GridMismatch, "potential length differs from grid");
  if (stencil == Stencil::Penta && grid.n_points < 7)
    throw Error(ErrorCode::InvalidArgument, "five-point stencil needs at least 7 grid points");
  if (dt == 0.0) throw Error(ErrorCode::InvalidArgument, "time step must be non-zero");

  const double h = grid.dx();
  const double k = hbar * hbar / (mass * h * h);
  if (stencil == Stencil::Tri) {
    kin0_ = k;
    kin1_ = -0.5 * k;
    kin2_ = 0.0;
  } else {
    kin0_ = 1.25 * k;
    kin1_ = -2.0 / 3.0 * k;
    kin2_ = k / 24.0;
  }
  const cplx f(0.0, dt / (2.0 * hbar));
  a_.resize(grid.n_points);
  for (std::size_t j = 0; j < grid.n_points; ++j) a_[j] = 1.0 + f * (kin0_ + v_[j]);
  b_ = f * kin1_;
  c_ = f * kin2_;
  factorize();
}

void BandedSystem::factorize() {
  const std::size_t n = grid_.n_points - 2;
  u0_.assign(n, 0.0);
  u1_.assign(n, 0.0);
  u2_.assign(n, 0.0);
  l1_.assign(n, 0.0);
  l2_.assign(n, 0.0);
  work_.assign(n, 0.0);
  double scale = 0;
  for (std::size_t j = 1; j + 1 < grid_.n_points; ++j) scale = std::max(scale, std::abs(a_[j]));
  for (std::size_t i = 0; i < n; ++i) {
    const cplx diag = a_[i + 1];
    if (i >= 2) l2_[i] = c_ / u0_[i - 2];
    if (i >= 1) {
      cplx sub = b_;
      if (i >= 2) sub -= l2_[i] * u1_[i - 2];
      l1_[i] = sub / u0_[i - 1];
    }
    cplx d = diag;
    if (i >= 1) d -= l1_[i] * u1_[i - 1];
    if (i >= 2) d -= l2_[i] * u2_[i - 2];
    if (std::abs(d) < 1e-14 * scale) {
      std::ostringstream os;
      os << "zero pivot at interior row " << i;
      throw Error(ErrorCode::SingularFactorization, os.str());
    }
    u0_[i] = d;
    u1_[i] = b_ - (i >= 1 ? l1_[i] * u2_[i - 1] : cplx{});
    u2_[i] = c_;
  }
}

std::vector<cplx> BandedSystem::apply_hamiltonian(const std::vector<cplx>& psi) const {
  const std::size_t n = psi.size();
  std::vector<cplx> out(n, 0.0);
  auto at = [&](std::size_t j, int off) -> cplx {
    const auto k = std::ptrdiff_t(j) + off;
    if (k <= 0 || k >= std::ptrdiff_t(n) - 1) return 0.0;
    return psi[std::size_t(k)];
  };
  for (std::size_t j = 1; j + 1 < n; ++j) {
    cplx h = (kin0_ + v_[j]) * psi[j] + kin1_ * (at(j, -1) + at(j, 1));
    if (stencil_ == Stencil::Penta) h += kin2_ * (at(j, -2) + at(j, 2));
    out[j] = h;
  }
  return out;
}

void BandedSystem::step_inplace(std::vector<cplx>& psi) const {
  const std::size_t np = psi.size();
  const std::size_t n = np - 2;
  auto& y = work_;
  const bool penta = stencil_ == Stencil::Penta;
  psi[0] = 0.0;
  psi[np - 1] = 0.0;
  // explicit half step: zeta = (2 - A) psi, then forward substitution
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + 1;
    cplx z = (2.0 - a_[j]) * psi[j] - b_ * (psi[j - 1] + psi[j + 1]);
    if (penta) {
      const cplx lo = j >= 2 ? psi[j - 2] : cplx{};
      const cplx hi = j + 2 < np ? psi[j + 2] : cplx{};
      z -= c_ * (lo + hi);
    }
    if (i >= 1) z -= l1_[i] * y[i - 1];
    if (i >= 2) z -= l2_[i] * y[i - 2];
    y[i] = z;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    cplx x = y[ii];
    if (ii + 1 < n) x -= u1_[ii] * psi[ii + 2];
    if (penta && ii + 2 < n) x -= u2_[ii] * psi[ii + 3];
    psi[ii + 1] = x / u0_[ii];
  }
}

BandedSystem build_system(const Grid& grid, const PotentialGrid& potential, double mass, double dt,
                          Stencil stencil, double hbar) {
  return BandedSystem(grid, potential, mass, dt, stencil, hbar);
}

WaveFunction step(const BandedSystem& system, const WaveFunction& psi) {
  if (!psi.grid.same_as(system.grid()) || psi.size() != system.grid().n_points)
    throw Error(ErrorCode::GridMismatch, "wave function grid differs from system grid");
  WaveFunction out = psi;
  system.step_inplace(out.psi);
  out.time += system.dt();
  return out;
}

double energy(const BandedSystem& system, const WaveFunction& psi) {
  const auto h = system.apply_hamiltonian(psi.psi);
  double e = 0, nrm = 0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    e += (std::conj(psi.psi[j]) * h[j]).real();
    nrm += std::norm(psi.psi[j]);
  }
  return e / nrm;
}

WaveFunction evolve(WaveFunction psi, const BandedSystem& system, std::size_t n_steps, const Observer& observer,
                    std::size_t cadence) {
  if (!psi.grid.same_as(system.grid()) || psi.size() != system.grid().n_points)
    throw Error(ErrorCode::GridMismatch, "wave function grid differs from system grid");
  if (cadence == 0) cadence = 1;
  for (std::size_t s = 1; s <= n_steps; ++s) {
    system.step_inplace(psi.psi);
    psi.time += system.dt();
    if (observer && s % cadence == 0) observer(s, psi);
  }
  return psi;
}

double tail_mass(const WaveFunction& wf, double fraction) {
  const std::size_t n = wf.size();
  const auto k = std::max<std::size_t>(1, std::size_t(std::ceil(fraction * double(n))));
  double lo = 0, hi = 0;
  for (std::size_t i = 0; i < k && i < n; ++i) {
    lo += std::norm(wf.psi[i]);
    hi += std::norm(wf.psi[n - 1 - i]);
  }
  return std::max(lo, hi) * wf.grid.dx();
}

bool needs_regrid(const WaveFunction& wf, const RegridPolicy& policy) {
  return tail_mass(wf, policy.trigger_fraction) > policy.trigger_mass;
}

std::vector<cplx> interpolate_cubic(const WaveFunction& wf, const Grid& grid) {
  const double h = wf.grid.dx();
  const std::size_t n = wf.size();
  std::vector<cplx> out(grid.n_points, 0.0);
  auto at = [&](std::ptrdiff_t i) -> cplx {
    return (i < 0 || i >= std::ptrdiff_t(n)) ? cplx{} : wf.psi[std::size_t(i)];
  };
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double s = (grid.x(k) - wf.grid.x_min) / h;
    const double fl = std::floor(s);
    const double t = s - fl;
    const auto i = std::ptrdiff_t(fl);
    if (i < -1 || i > std::ptrdiff_t(n)) continue;
    if (t < 1e-9) {
      out[k] = at(i);
      continue;
    }
    if (t > 1.0 - 1e-9) {
      out[k] = at(i + 1);
      continue;
    }
    const double w0 = -t * (t - 1) * (t - 2) / 6.0;
    const double w1 = (t + 1) * (t - 1) * (t - 2) / 2.0;
    const double w2 = -(t + 1) * t * (t - 2) / 2.0;
    const double w3 = (t + 1) * t * (t - 1) / 6.0;
    out[k] = w0 * at(i - 1) + w1 * at(i) + w2 * at(i + 1) + w3 * at(i + 2);
  }
  return out;
}

RegridResult regrid(const WaveFunction& wf, const RegridPolicy& policy) {
  const double h = wf.grid.dx();
  const std::size_t n = wf.size();
  double nrm = 0, mx = 0, mx2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::norm(wf.psi[i]);
    const double x = wf.grid.x(i);
    nrm += r;
    mx += r * x;
    mx2 += r * x * x;
  }
  mx /= nrm;
  const double spread = std::sqrt(std::max(0.0, mx2 / nrm - mx * mx));
  const double hw = std::max(policy.safety, policy.half_width_factor) * spread;

  double lo = mx - hw, hi = mx + hw;
  if (policy.x_lo_limit) lo = std::max(lo, *policy.x_lo_limit);
  if (policy.x_hi_limit) hi = std::min(hi, *policy.x_hi_limit);
  // snap to the old lattice
  const double shift = std::round((lo - wf.grid.x_min) / h);
  lo = wf.grid.x_min + shift * h;
  if (policy.x_lo_limit && lo < *policy.x_lo_limit - 1e-9 * h) lo += h;
  auto cells = std::size_t(std::floor((hi - lo) / h + 1e-9));
  if (policy.x_hi_limit) {
    while (cells > 0 && lo + double(cells) * h > *policy.x_hi_limit + 1e-9 * h) --cells;
  }
  if (cells < 6) throw Error(ErrorCode::GridTooNarrow, "regrid window collapsed");
  const Grid g(lo, lo + double(cells) * h, cells + 1);

  RegridResult res;
  res.moved = !g.same_as(wf.grid);
  if (!res.moved) {
    res.wf = wf;
    return res;
  }
  res.wf.grid = g;
  res.wf.time = wf.time;
  res.wf.psi = interpolate_cubic(wf, g);
  res.wf.psi.front() = 0.0;
  res.wf.psi.back() = 0.0;
  const double kept = norm(res.wf);
  const double before = norm(wf);
  res.discarded = std::max(0.0, before - kept);
  if (res.discarded > policy.truncation_tol) {
    std::ostringstream os;
    os << "regrid would discard probability " << res.discarded;
    throw Error(ErrorCode::TailTruncation, os.str());
  }
  const double s = std::sqrt(before / kept);
  for (auto& v : res.wf.psi) v *= s;
  return res;
}

}  // namespace cvq
