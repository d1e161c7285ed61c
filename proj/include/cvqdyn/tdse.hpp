#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cvqdyn/core.hpp"

namespace cvq {

struct PotentialGrid {
  std::vector<double> values;

  static PotentialGrid sample(const Grid& grid, const std::function<double(double)>& v);
};

// Crank-Nicolson system (1 + i H dt / 2 hbar) psi' = (1 - i H dt / 2 hbar) psi on
// the interior points of a grid with zero boundary values.
class BandedSystem {
 public:
  BandedSystem(const Grid& grid, const PotentialGrid& potential, double mass, double dt, Stencil stencil,
               double hbar);

  const Grid& grid() const { return grid_; }
  Stencil stencil() const { return stencil_; }
  double dt() const { return dt_; }
  double mass() const { return mass_; }
  double hbar() const { return hbar_; }
  const std::vector<double>& potential() const { return v_; }

  // diagonal a_j (for grid index j), first and second off-diagonals
  cplx a(std::size_t j) const { return a_[j]; }
  cplx b() const { return b_; }
  cplx c() const { return c_; }

  // H psi with the active stencil; boundary rows are zero
  std::vector<cplx> apply_hamiltonian(const std::vector<cplx>& psi) const;
  void step_inplace(std::vector<cplx>& psi) const;

 private:
  Grid grid_;
  Stencil stencil_;
  double mass_, dt_, hbar_;
  std::vector<double> v_;
  std::vector<cplx> a_;
  cplx b_{}, c_{};
  double kin0_ = 0, kin1_ = 0, kin2_ = 0;  // stencil weights of -hbar^2/2m d^2/dx^2
  // LU factors over interior unknowns
  std::vector<cplx> u0_, u1_, u2_, l1_, l2_;
  mutable std::vector<cplx> work_;

  void factorize();
};

BandedSystem build_system(const Grid& grid, const PotentialGrid& potential, double mass, double dt,
                          Stencil stencil, double hbar);

WaveFunction step(const BandedSystem& system, const WaveFunction& psi);

// <H> with the discrete Hamiltonian of the system (real part)
double energy(const BandedSystem& system, const WaveFunction& psi);

using Observer = std::function<void(std::size_t step, const WaveFunction&)>;

WaveFunction evolve(WaveFunction psi, const BandedSystem& system, std::size_t n_steps, const Observer& observer = {},
                    std::size_t cadence = 1);

struct RegridPolicy {
  double safety = 7.0;            // minimum half-width in units of the position spread
  double half_width_factor = 10.0;  // half-width used when a regrid fires
  double trigger_fraction = 0.05;   // outer fraction of the box watched on each side
  double trigger_mass = 1e-8;
  double truncation_tol = 1e-6;
  std::optional<double> x_lo_limit;
  std::optional<double> x_hi_limit;
};

double tail_mass(const WaveFunction& wf, double fraction);
bool needs_regrid(const WaveFunction& wf, const RegridPolicy& policy);

struct RegridResult {
  WaveFunction wf;
  double discarded = 0;  // probability outside the new window before renormalization
  bool moved = false;
};

// Recentre the box on <x>. Spacing is kept; the new lattice is aligned with the
// old one when possible so that the interpolation is exact at nodes.
RegridResult regrid(const WaveFunction& wf, const RegridPolicy& policy);

// Cubic (four-point Lagrange) interpolation of wf onto grid; zero outside.
std::vector<cplx> interpolate_cubic(const WaveFunction& wf, const Grid& grid);

}  // namespace cvq
