#pragma once

#include <vector>

#include "cvqdyn/core.hpp"
#include "cvqdyn/tdse.hpp"

namespace cvq {

// Head-on collision in natural units: lengths in fm, energies and momenta in
// MeV, time in fm/c, hbar = hbar c.
struct CollisionConfig {
  double Z_P = 2, Z_T = 79;
  double m = Constants::alpha_particle_mass;
  double L = 1e4;       // launch distance
  double T0 = 5;        // kinetic energy
  double sigma = 100;   // initial spread
  double l = 25;        // barrier cut
  double hbar_c = Constants::hbar_c;
  double alpha = Constants::fine_structure_alpha;

  double coupling() const { return Z_P * Z_T * alpha * hbar_c; }
  double p0() const;
  double E0() const;
  double d_cl() const;
  double velocity() const;   // sqrt(2 E0 / m)
  double tau_cl() const;
  double sigma_optimal() const;  // sqrt(hbar L / 2 p0)
  void validate() const;
};

struct ClassicalState {
  double x = 0, p = 0, F = 0;
};

// G(u) = u w + (d/2) ln((1+w)/(1-w)), w = sqrt(1 - d/u); the trajectory obeys
// G(|x|) = v |t - tau_cl|.
double classical_action_length(double u, double d);
ClassicalState classical_trajectory(const CollisionConfig& cfg, double t);

// <F>/F_cl for the initial Gaussian
double jensen_force_ratio(const CollisionConfig& cfg);

struct SolverOptions {
  double dx = 0.2;
  double dt = 1.0;
  std::size_t cadence = 20;   // steps between observations
  Stencil stencil = Stencil::Penta;
  RegridPolicy regrid;
  bool run_to_return = false;  // otherwise stop shortly after the collision
  std::size_t max_steps = 50'000'000;
  bool record_series = true;
};

struct TrajectorySample {
  double t = 0, mean_x = 0, spread_x = 0, mean_p = 0, energy = 0;
};

struct CollisionReport {
  double d_cl = 0, d_qm = 0;
  double tau_cl = 0, tau_qm = 0;     // tau_qm: <p> vanishes
  double tau_min_spread = 0;
  double min_spread = 0;
  double sigma0_optimal = 0;
  double bound_width = 0;            // upper bound offset on d_qm - d_cl
  bool bound_ok = false;
  double return_time = 0;            // <x> back at the launch point
  double return_asymmetry = 0;       // (T - tau_qm) - tau_qm
  double peak_energy_error = 0;      // max |1 - <H>/<H(0)>|
  double peak_energy_error_kinetic = 0;  // same with <p^2>/2m + <V> from derivatives
  std::size_t regrids = 0;
  std::vector<TrajectorySample> series;
};

// Gaussian projectile from x = -L towards the fixed target at the origin.
CollisionReport quantum_collision(const CollisionConfig& cfg, const SolverOptions& opts);

// Two identical nuclei launched from -L and +L towards each other; mapped to
// the relative coordinate (mass m/2, launch distance 2L, width sigma sqrt 2).
struct CollidingReport {
  CollisionConfig relative;
  CollisionReport report;
  double com_momentum = 0;
  double projectile_optimal_width = 0;  // sqrt(hbar L / 2 p0)
  double relative_optimal_width = 0;    // sqrt(hbar L / p0)
};

CollidingReport colliding_packets(const CollisionConfig& cfg, const SolverOptions& opts);

double classical_crossing_probability(const CollisionConfig& cfg);
double classical_crossing_limit(const CollisionConfig& cfg);  // p_lim

double wkb_action_integral(const CollisionConfig& cfg);      // int_l^{d_cl} sqrt(2m(V - E0)) dx
double wkb_tunneling(const CollisionConfig& cfg);

struct TunnelingOptions {
  double dx = 0.2;
  double dt = 100.0;                // energy-shifted steps; the asymptotic split is dt independent
  Stencil stencil = Stencil::Penta;
  double absorber_width = 300;      // beyond the well
  double well_margin = 200;         // distance from -l to the absorber
  double flux_tol = 1e-12;
  std::size_t flux_samples = 100;
  std::size_t max_steps = 2'000'000;
  bool barrier = true;              // false: V = 0 everywhere
  RegridPolicy regrid;
};

struct TunnelingReport {
  double P_T = 0;
  double absorbed = 0;
  double reflected = 0;
  std::size_t steps = 0;
};

TunnelingReport dynamical_tunneling(const CollisionConfig& cfg, const TunnelingOptions& opts);

}  // namespace cvq
