#pragma once

#include <string>
#include <vector>

#include "cvqdyn/core.hpp"

namespace cvq {

enum class PotentialKind {
  Newtonian,
  Coulomb,
  GenericPotential,
  GenericForce,
  Casimir,
  MOND,
  HarmonicTrap,
  Composite,
};

const char* kind_name(PotentialKind k);

// A two-body central interaction V(r) between identical masses m a distance
// L + r apart. Constants are carried in the unit system of the caller.
struct CentralPotentialSpec {
  PotentialKind kind = PotentialKind::Newtonian;
  double L = 1;     // baseline separation
  double m = 1;     // particle mass
  double G = Constants::newton_G;
  double a0 = Constants::mond_a0;
  double hbar_c = 1;
  double alpha = Constants::fine_structure_alpha;
  double q1 = 1, q2 = 1;              // charges in units of e
  double C = 0, X = 1;                // generic strength and offset
  int j = 1;                          // generic exponent
  double R0 = 0;                      // Casimir sphere radius
  double omega0 = 0;                  // harmonic trap frequency
  std::vector<CentralPotentialSpec> members;

  static CentralPotentialSpec newtonian(double m, double L, double G = Constants::newton_G);
  static CentralPotentialSpec coulomb(double q1, double q2, double m, double L, double hbar_c,
                                      double alpha = Constants::fine_structure_alpha);
  static CentralPotentialSpec generic_potential(double C, double X, int j, double m);
  static CentralPotentialSpec generic_force(double C, double X, int j, double m);
  static CentralPotentialSpec casimir(double R0, double m, double L, double hbar_c);
  static CentralPotentialSpec mond(double m, double L, double G = Constants::newton_G,
                                   double a0 = Constants::mond_a0);
  static CentralPotentialSpec harmonic_trap(double omega0, double m);
  static CentralPotentialSpec composite(std::vector<CentralPotentialSpec> members);
};

struct OmegaSquared {
  double value = 0;       // magnitude
  bool attractive = true; // hyperbolic dynamics when true, trigonometric otherwise
  double signed_value() const { return attractive ? value : -value; }
};

OmegaSquared omega_squared(const CentralPotentialSpec& spec);

// k-th derivative of V at displacement r
double potential_derivative(const CentralPotentialSpec& spec, int k, double r);
double potential_value(const CentralPotentialSpec& spec, double r);

struct ExpansionCoeffs {
  int order = 0;
  std::vector<double> c;  // coefficient of r^n, n = 0..order
  bool constant_droppable = true;

  double evaluate(double r, bool include_constant = true) const;
};

ExpansionCoeffs expand(const CentralPotentialSpec& spec, int N);

// Force-gradient enhancement from the free drift r_cl = -2 p0 t / m.
double epsilon3(const CentralPotentialSpec& spec, double p0, double m, double t);
// Strong-coupling fallback with a supplied <r>(t).
double epsilon3_from_mean(const CentralPotentialSpec& spec, double mean_r);

double epsilon_n(const CentralPotentialSpec& spec, int n, double p0, double sigma, double omega0, double m, double t);
double epsilon4(const CentralPotentialSpec& spec, double p0, double sigma, double omega0, double m, double t);

struct MondRegime {
  bool deep_mond = false;
  double ratio = 0;          // (L/R0) divided by the threshold
  double threshold = 0;      // required L/R0
  double a_N = 0;            // Newtonian acceleration G m / L^2
};

MondRegime mond_regime_check(double rho0, double R0, double L, double G = Constants::newton_G,
                             double a0 = Constants::mond_a0);

double sphere_mass(double rho, double R);
double sphere_radius(double rho, double m);

}  // namespace cvq
