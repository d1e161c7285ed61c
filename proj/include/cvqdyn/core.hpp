#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvq {

using cplx = std::complex<double>;

enum class ErrorCode {
  GridTooNarrow,
  NotNormalized,
  SingularFactorization,
  GridMismatch,
  TailTruncation,
  NotSeparable,
  SupportClipped,
  ProximityViolated,
  TrapUnstable,
  NonPhysical,
  DomainError,
  SingularCovariance,
  RankExhausted,
  ZeroMomentumCrossing,
  RootBracketFailure,
  AboveBarrier,
  NotConverged,
  InvalidArgument,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Physical constants. SI unless the field name says otherwise.
struct Constants {
  static constexpr double hbar = 1.054571817e-34;          // J s
  static constexpr double hbar_c = 197.3269804;            // MeV fm
  static constexpr double fine_structure_alpha = 1.0 / 137.035999084;
  static constexpr double alpha_particle_mass = 3727.3794066;  // MeV
  static constexpr double newton_G = 6.67430e-11;          // m^3 kg^-1 s^-2
  static constexpr double mond_a0 = 1.2e-10;               // m s^-2
  static constexpr double boltzmann_kB = 1.380649e-23;     // J/K
  static constexpr double speed_of_light = 299792458.0;    // m/s
  static constexpr double density_osmium = 22.5872e3;      // kg/m^3
  static constexpr double density_silica = 2.65e3;         // kg/m^3
  static constexpr double electron_volt = 1.602176634e-19; // J
};

enum class Quantity { Length, Time, Mass, Energy, Momentum };

// Unit bookkeeping. Each mode defines how one internal unit of a quantity
// maps to SI.
class UnitSystem {
 public:
  enum class Mode { NaturalMeVfm, SI, Dimensionless };

  static UnitSystem natural();
  static UnitSystem si();
  // hbar = m = 1 with the given length and mass references.
  static UnitSystem dimensionless(double length_m = 1.0, double mass_kg = 1.0);

  Mode mode() const { return mode_; }
  double hbar() const;  // value of hbar in internal units
  double scale(Quantity q) const;
  double to_si(double value, Quantity q) const { return value * scale(q); }
  double from_si(double value, Quantity q) const { return value / scale(q); }

 private:
  Mode mode_ = Mode::SI;
  double length_ = 1, time_ = 1, mass_ = 1;
};

struct Grid {
  double x_min = 0;
  double x_max = 0;
  std::size_t n_points = 0;

  Grid() = default;
  Grid(double lo, double hi, std::size_t n);
  // grid with spacing dx covering [lo, hi] (hi adjusted up to a lattice point)
  static Grid with_spacing(double lo, double hi, double dx);

  double dx() const { return (x_max - x_min) / double(n_points - 1); }
  double x(std::size_t i) const { return x_min + double(i) * dx(); }
  bool same_as(const Grid& other, double rel_tol = 1e-12) const;
};

struct GaussianState {
  double x0 = 0;
  double sigma = 1;
  double p0 = 0;
};

struct WaveFunction {
  Grid grid;
  std::vector<cplx> psi;
  double time = 0;

  std::size_t size() const { return psi.size(); }
};

enum class Stencil { Tri, Penta };

struct MomentSet {
  double norm = 0;
  double mean_x = 0;
  double mean_p = 0;
  double var_x = 0;
  double var_p = 0;
  double cov_xp = 0;
  double skewness = 0;
  std::optional<double> var_p_energy;  // from the energy-conservation shortcut
  bool p2_disagree = false;

  double uncertainty_product() const;
};

// Supplies what the energy shortcut needs: the initial <p^2>, the initial
// potential average and the potential on the grid of the state passed in.
struct EnergyHint {
  double p2_initial = 0;
  double v_initial = 0;
  std::vector<double> potential;
};

double trapezoid(const std::vector<double>& f, double dx);
double norm(const WaveFunction& wf);

// Central first derivative, 3-point (Tri) or 5-point (Penta); values
// outside the grid are zero.
std::vector<cplx> derivative(const std::vector<cplx>& psi, double dx, Stencil s);

WaveFunction make_gaussian(const Grid& grid, const GaussianState& g, double hbar);
cplx gaussian_amplitude(double x, const GaussianState& g, double hbar);

MomentSet moments(const WaveFunction& wf, double hbar, double mass, Stencil s = Stencil::Penta,
                  const EnergyHint* hint = nullptr);

// Free-space and harmonic-oscillator uncertainty products.
double analytic_free_uncertainty(double t, double sigma, double m, double hbar);
double analytic_ho_uncertainty(double t, double sigma, double m, double omega, double hbar);

}  // namespace cvq
