#include "cvqdyn/potentials.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cvq {

namespace {

constexpr double pi = std::numbers::pi;

// k-th derivative of coef * (X + r)^(-p)
double power_derivative(double coef, double X, double p, int k, double r) {
  double f = coef;
  for (int i = 0; i < k; ++i) f *= -(p + i);
  return f * std::pow(X + r, -p - k);
}

// k-th derivative of coef * ln(X + r)
double log_derivative(double coef, double X, int k, double r) {
  if (k == 0) return coef * std::log(X + r);
  double fact = 1;
  for (int i = 1; i < k; ++i) fact *= i;
  return coef * ((k - 1) % 2 == 0 ? 1.0 : -1.0) * fact * std::pow(X + r, -k);
}

double mond_strength(const CentralPotentialSpec& s) {
  return 4.0 / 3.0 * (std::sqrt(2.0) - 1.0) * s.m * std::sqrt(s.G * s.m * s.a0);
}

void check_casimir(const CentralPotentialSpec& s) {
  if (!(s.L > 2.0 * s.R0)) {
    std::ostringstream os;
    os << "Casimir separation L = " << s.L << " must exceed 2 R0 = " << 2 * s.R0;
    throw Error(ErrorCode::ProximityViolated, os.str());
  }
}

}  // namespace

const char* kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::Newtonian: return "newtonian";
    case PotentialKind::Coulomb: return "coulomb";
    case PotentialKind::GenericPotential: return "generic-potential";
    case PotentialKind::GenericForce: return "generic-force";
    case PotentialKind::Casimir: return "casimir";
    case PotentialKind::MOND: return "mond";
    case PotentialKind::HarmonicTrap: return "harmonic-trap";
    case PotentialKind::Composite: return "composite";
  }
  return "unknown";
}

CentralPotentialSpec CentralPotentialSpec::newtonian(double m, double L, double G) {
  CentralPotentialSpec s;
  s.kind = PotentialKind::Newtonian;
  s.m = m;
  s.L = L;
  s.G = G;
  return s;
}

CentralPotentialSpec CentralPotentialSpec::coulomb(double q1, double q2, double m, double L, double hbar_c,
                                                   double alpha) {
  CentralPotentialSpec s;
  s.kind = PotentialKind::Coulomb;
  s.q1 = q1;
  s.q2 = q2;
  s.m = m;
  s.L = L;
  s.hbar_c = hbar_c;
  s.alpha = alpha;
  return s;
}

CentralPotentialSpec CentralPotentialSpec::generic_potential(double C, double X, int j, double m) {
  CentralPotentialSpec s;
  s.kind = PotentialKind::GenericPotential;
  s.C = C;
  s.X = X;
  s.L = X;
  s.j = j;
  s.m = m;
  return s;
}

CentralPotentialSpec CentralPotentialSpec::generic_force(double C, double X, int j, double m) {
  CentralPotentialSpec s = generic_potential(C, X, j, m);
  s.kind = PotentialKind::GenericForce;
  return s;
}

CentralPotentialSpec CentralPotentialSpec::casimir(double R0, double m, double L, double hbar_c) {
  CentralPotentialSpec s;
  s.kind = PotentialKind::Casimir;
  s.R0 = R0;
  s.m = m;
  s.L = L;
  s.hbar_c = hbar_c;
  check_casimir(s);
  return s;
}

CentralPotentialSpec CentralPotentialSpec::mond(double m, double L, double G, double a0) {
  CentralPotentialSpec s;
  s.kind = PotentialKind::MOND;
  s.m = m;
  s.L = L;
  s.G = G;
  s.a0 = a0;
  return s;
}

CentralPotentialSpec CentralPotentialSpec::harmonic_trap(double omega0, double m) {
  CentralPotentialSpec s;
  s.kind = PotentialKind::HarmonicTrap;
  s.omega0 = omega0;
  s.m = m;
  return s;
}

CentralPotentialSpec CentralPotentialSpec::composite(std::vector<CentralPotentialSpec> members) {
  if (members.empty()) throw Error(ErrorCode::InvalidArgument, "composite interaction needs members");
  CentralPotentialSpec s;
  s.kind = PotentialKind::Composite;
  s.m = members.front().m;
  s.L = members.front().L;
  for (const auto& mbr : members) {
    if (std::abs(mbr.m - s.m) > 1e-12 * std::abs(s.m))
      throw Error(ErrorCode::InvalidArgument, "composite members must share the particle mass");
  }
  s.members = std::move(members);
  return s;
}

double potential_derivative(const CentralPotentialSpec& s, int k, double r) {
  switch (s.kind) {
    case PotentialKind::Newtonian:
      return power_derivative(-s.G * s.m * s.m, s.L, 1.0, k, r);
    case PotentialKind::Coulomb:
      return power_derivative(s.q1 * s.q2 * s.alpha * s.hbar_c, s.L, 1.0, k, r);
    case PotentialKind::GenericPotential:
      return power_derivative(-s.C, s.X, double(s.j), k, r);
    case PotentialKind::GenericForce:
      if (s.j == 1) return log_derivative(s.C, s.X, k, r);
      return power_derivative(-s.C / double(s.j - 1), s.X, double(s.j - 1), k, r);
    case PotentialKind::Casimir:
      check_casimir(s);
      return power_derivative(-std::pow(pi, 3) * s.hbar_c * s.R0 / 1440.0, s.L - 2.0 * s.R0, 2.0, k, r);
    case PotentialKind::MOND:
      return log_derivative(mond_strength(s), s.L, k, r);
    case PotentialKind::HarmonicTrap: {
      const double c = 0.25 * s.m * s.omega0 * s.omega0;
      if (k == 0) return c * r * r;
      if (k == 1) return 2 * c * r;
      if (k == 2) return 2 * c;
      return 0.0;
    }
    case PotentialKind::Composite: {
      double v = 0;
      for (const auto& mbr : s.members) v += potential_derivative(mbr, k, r);
      return v;
    }
  }
  return 0.0;
}

double potential_value(const CentralPotentialSpec& spec, double r) { return potential_derivative(spec, 0, r); }

OmegaSquared omega_squared(const CentralPotentialSpec& s) {
  OmegaSquared w;
  switch (s.kind) {
    case PotentialKind::Newtonian:
      w.value = 4.0 * s.G * s.m / std::pow(s.L, 3);
      break;
    case PotentialKind::Coulomb: {
      const double q = s.q1 * s.q2;
      w.value = 4.0 * std::abs(q) * s.alpha * s.hbar_c / (s.m * std::pow(s.L, 3));
      w.attractive = q < 0;
      break;
    }
    case PotentialKind::GenericPotential:
      w.value = 2.0 * s.j * (s.j + 1) * s.C / (s.m * std::pow(s.X, s.j + 2));
      break;
    case PotentialKind::GenericForce:
      w.value = 2.0 * s.j * s.C / (s.m * std::pow(s.X, s.j + 1));
      break;
    case PotentialKind::Casimir:
      check_casimir(s);
      w.value = std::pow(pi, 3) * s.hbar_c * s.R0 / (120.0 * s.m * std::pow(s.L - 2.0 * s.R0, 4));
      break;
    case PotentialKind::MOND:
      w.value = 8.0 / 3.0 * (std::sqrt(2.0) - 1.0) * std::sqrt(s.G * s.m * s.a0) / (s.L * s.L);
      break;
    case PotentialKind::HarmonicTrap:
      w.value = s.omega0 * s.omega0;
      w.attractive = false;
      break;
    case PotentialKind::Composite: {
      double sum = 0;
      for (const auto& mbr : s.members) sum += omega_squared(mbr).signed_value();
      w.value = std::abs(sum);
      w.attractive = sum >= 0;
      break;
    }
  }
  if (w.value < 0) {
    w.value = -w.value;
    w.attractive = !w.attractive;
  }
  return w;
}

double ExpansionCoeffs::evaluate(double r, bool include_constant) const {
  double v = 0, p = 1;
  for (int n = 0; n <= order; ++n) {
    if (n > 0 || include_constant) v += c[std::size_t(n)] * p;
    p *= r;
  }
  return v;
}

ExpansionCoeffs expand(const CentralPotentialSpec& spec, int N) {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "expansion order must be non-negative");
  ExpansionCoeffs e;
  e.order = N;
  e.c.resize(std::size_t(N) + 1);
  double fact = 1;
  for (int n = 0; n <= N; ++n) {
    if (n > 0) fact *= n;
    e.c[std::size_t(n)] = potential_derivative(spec, n, 0.0) / fact;
  }
  return e;
}

double epsilon3_from_mean(const CentralPotentialSpec& spec, double mean_r) {
  if (spec.kind == PotentialKind::Composite) {
    const double w2 = omega_squared(spec).signed_value();
    double acc = 0;
    for (const auto& mbr : spec.members) acc += omega_squared(mbr).signed_value() * epsilon3_from_mean(mbr, mean_r);
    return acc / w2;
  }
  const double d2 = potential_derivative(spec, 2, 0.0);
  if (d2 == 0.0) return 0.0;
  return potential_derivative(spec, 3, 0.0) / d2 * mean_r;
}

double epsilon3(const CentralPotentialSpec& spec, double p0, double m, double t) {
  return epsilon3_from_mean(spec, -2.0 * p0 * t / m);
}

double epsilon_n(const CentralPotentialSpec& spec, int n, double p0, double sigma, double omega0, double m, double t) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "correction series starts at n = 3");
  const double r = -2.0 * p0 * t / m;
  const double dr0 = std::sqrt(2.0 * sigma * sigma * (1.0 + omega0 * omega0 * t * t));
  double sum = 0;
  for (int k = 0; k <= n - 2; k += 2) {
    const double binom = std::tgamma(n - 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - 1.0 - k));
    sum += binom * std::pow(r, n - k - 2) * std::pow(std::sqrt(2.0) * dr0, k) * std::tgamma((k + 1) / 2.0);
  }
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign / (2.0 * std::sqrt(pi) * std::pow(spec.L, n - 2)) * n * (n - 1) * sum;
}

double epsilon4(const CentralPotentialSpec& spec, double p0, double sigma, double omega0, double m, double t) {
  const double L2 = spec.L * spec.L;
  return 24.0 * p0 * p0 * t * t / (m * m * L2) + 12.0 * sigma * sigma / L2 * (1.0 + omega0 * omega0 * t * t);
}

double sphere_mass(double rho, double R) { return rho * 4.0 / 3.0 * pi * R * R * R; }
double sphere_radius(double rho, double m) { return std::cbrt(m / (rho * 4.0 / 3.0 * pi)); }

MondRegime mond_regime_check(double rho0, double R0, double L, double G, double a0) {
  MondRegime r;
  r.threshold = std::sqrt(3.0) / (std::sqrt(2.0) - 1.0) * std::sqrt(pi * G * rho0 * R0 / a0);
  r.ratio = (L / R0) / r.threshold;
  r.deep_mond = r.ratio > 1.0;
  r.a_N = G * sphere_mass(rho0, R0) / (L * L);
  return r;
}

}  // namespace cvq
