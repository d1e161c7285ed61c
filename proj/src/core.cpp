#include "cvqdyn/core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cvq {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::GridTooNarrow: return "GridTooNarrow";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::SingularFactorization: return "SingularFactorization";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::TailTruncation: return "TailTruncation";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::SupportClipped: return "SupportClipped";
    case ErrorCode::ProximityViolated: return "ProximityViolated";
    case ErrorCode::TrapUnstable: return "TrapUnstable";
    case ErrorCode::NonPhysical: return "NonPhysical";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::RankExhausted: return "RankExhausted";
    case ErrorCode::ZeroMomentumCrossing: return "ZeroMomentumCrossing";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::AboveBarrier: return "AboveBarrier";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

UnitSystem UnitSystem::natural() {
  UnitSystem u;
  u.mode_ = Mode::NaturalMeVfm;
  u.length_ = 1e-15;
  u.time_ = 1e-15 / Constants::speed_of_light;
  const double mev = 1e6 * Constants::electron_volt;
  u.mass_ = mev / (Constants::speed_of_light * Constants::speed_of_light);
  return u;
}

UnitSystem UnitSystem::si() { return UnitSystem{}; }

UnitSystem UnitSystem::dimensionless(double length_m, double mass_kg) {
  UnitSystem u;
  u.mode_ = Mode::Dimensionless;
  u.length_ = length_m;
  u.mass_ = mass_kg;
  u.time_ = mass_kg * length_m * length_m / Constants::hbar;
  return u;
}

double UnitSystem::scale(Quantity q) const {
  switch (q) {
    case Quantity::Length: return length_;
    case Quantity::Time: return time_;
    case Quantity::Mass: return mass_;
    case Quantity::Energy: return mass_ * length_ * length_ / (time_ * time_);
    case Quantity::Momentum: return mass_ * length_ / time_;
  }
  return 1.0;
}

double UnitSystem::hbar() const {
  return Constants::hbar / (scale(Quantity::Energy) * scale(Quantity::Time));
}

Grid::Grid(double lo, double hi, std::size_t n) : x_min(lo), x_max(hi), n_points(n) {
  if (n < 7) throw Error(ErrorCode::InvalidArgument, "grid needs at least 7 points");
  if (!(hi > lo)) throw Error(ErrorCode::InvalidArgument, "grid bounds must satisfy x_min < x_max");
}

Grid Grid::with_spacing(double lo, double hi, double dx) {
  const auto cells = std::size_t(std::ceil((hi - lo) / dx - 1e-9));
  return Grid(lo, lo + double(cells) * dx, cells + 1);
}

bool Grid::same_as(const Grid& o, double rel_tol) const {
  if (n_points != o.n_points) return false;
  const double h = dx();
  return std::abs(x_min - o.x_min) <= rel_tol * h * double(n_points) &&
         std::abs(x_max - o.x_max) <= rel_tol * h * double(n_points);
}

double MomentSet::uncertainty_product() const { return std::sqrt(var_x * var_p); }

double trapezoid(const std::vector<double>& f, double dx) {
  if (f.empty()) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * dx;
}

double norm(const WaveFunction& wf) {
  std::vector<double> rho(wf.size());
  for (std::size_t i = 0; i < wf.size(); ++i) rho[i] = std::norm(wf.psi[i]);
  return trapezoid(rho, wf.grid.dx());
}

std::vector<cplx> derivative(const std::vector<cplx>& psi, double dx, Stencil s) {
  const std::size_t n = psi.size();
  auto at = [&](std::ptrdiff_t i) -> cplx {
    return (i < 0 || i >= std::ptrdiff_t(n)) ? cplx{} : psi[std::size_t(i)];
  };
  std::vector<cplx> d(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = std::ptrdiff_t(k);
    if (s == Stencil::Tri) {
      d[k] = (at(i + 1) - at(i - 1)) / (2.0 * dx);
    } else {
      d[k] = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * dx);
    }
  }
  return d;
}

cplx gaussian_amplitude(double x, const GaussianState& g, double hbar) {
  const double u = x - g.x0;
  const double amp = std::pow(2.0 * std::numbers::pi * g.sigma * g.sigma, -0.25);
  return amp * std::exp(cplx(-u * u / (4.0 * g.sigma * g.sigma), g.p0 * u / hbar));
}

WaveFunction make_gaussian(const Grid& grid, const GaussianState& g, double hbar) {
  if (!(g.sigma > 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  if (g.x0 - 7.0 * g.sigma < grid.x_min || g.x0 + 7.0 * g.sigma > grid.x_max) {
    std::ostringstream os;
    os << "window [" << g.x0 - 7 * g.sigma << ", " << g.x0 + 7 * g.sigma << "] exceeds grid ["
       << grid.x_min << ", " << grid.x_max << "]";
    throw Error(ErrorCode::GridTooNarrow, os.str());
  }
  WaveFunction wf;
  wf.grid = grid;
  wf.psi.resize(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) wf.psi[i] = gaussian_amplitude(grid.x(i), g, hbar);
  wf.psi.front() = 0.0;
  wf.psi.back() = 0.0;
  return wf;
}

MomentSet moments(const WaveFunction& wf, double hbar, double mass, Stencil s, const EnergyHint* hint) {
  const std::size_t n = wf.size();
  const double dx = wf.grid.dx();
  MomentSet m;
  std::vector<double> f(n);

  for (std::size_t i = 0; i < n; ++i) f[i] = std::norm(wf.psi[i]);
  m.norm = trapezoid(f, dx);
  if (std::abs(m.norm - 1.0) > 1e-3) {
    std::ostringstream os;
    os << "norm " << m.norm;
    throw Error(ErrorCode::NotNormalized, os.str());
  }
  const std::vector<double> rho = f;

  for (std::size_t i = 0; i < n; ++i) f[i] = wf.grid.x(i) * rho[i];
  m.mean_x = trapezoid(f, dx) / m.norm;

  double m2 = 0, m3 = 0;
  {
    std::vector<double> g2(n), g3(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = wf.grid.x(i) - m.mean_x;
      g2[i] = u * u * rho[i];
      g3[i] = u * u * u * rho[i];
    }
    m2 = trapezoid(g2, dx) / m.norm;
    m3 = trapezoid(g3, dx) / m.norm;
  }
  m.var_x = m2;
  m.skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;

  // <p> from the raw derivative, then the carrier exp(i<p>x/hbar) is removed
  // so that the centred moments are evaluated on a slowly varying envelope.
  const auto d = derivative(wf.psi, dx, s);
  for (std::size_t i = 0; i < n; ++i) f[i] = (std::conj(wf.psi[i]) * cplx(0, -hbar) * d[i]).real();
  const double p_raw = trapezoid(f, dx) / m.norm;

  std::vector<cplx> env(n);
  for (std::size_t i = 0; i < n; ++i)
    env[i] = wf.psi[i] * std::exp(cplx(0, -p_raw * (wf.grid.x(i) - m.mean_x) / hbar));
  const auto de = derivative(env, dx, s);
  for (std::size_t i = 0; i < n; ++i) f[i] = (std::conj(env[i]) * cplx(0, -hbar) * de[i]).real();
  const double p_res = trapezoid(f, dx) / m.norm;
  m.mean_p = p_raw + p_res;

  for (std::size_t i = 0; i < n; ++i) f[i] = hbar * hbar * std::norm(de[i]);
  m.var_p = trapezoid(f, dx) / m.norm - p_res * p_res;

  for (std::size_t i = 0; i < n; ++i) {
    const double u = wf.grid.x(i) - m.mean_x;
    f[i] = (std::conj(env[i]) * u * cplx(0, -hbar) * de[i]).real();
  }
  m.cov_xp = trapezoid(f, dx) / m.norm;

  if (hint) {
    if (hint->potential.size() != n) throw Error(ErrorCode::GridMismatch, "potential length differs from grid");
    for (std::size_t i = 0; i < n; ++i) f[i] = hint->potential[i] * rho[i];
    const double v_now = trapezoid(f, dx) / m.norm;
    const double p2 = hint->p2_initial + 2.0 * mass * (hint->v_initial - v_now);
    m.var_p_energy = p2 - m.mean_p * m.mean_p;
    const double p2_quad = m.var_p + m.mean_p * m.mean_p;
    m.p2_disagree = std::abs(p2 - p2_quad) > 1e-4 * std::abs(p2_quad);
  }
  return m;
}

double analytic_free_uncertainty(double t, double sigma, double m, double hbar) {
  const double w0 = hbar / (2.0 * m * sigma * sigma);
  return 0.5 * hbar * std::sqrt(1.0 + w0 * w0 * t * t);
}

double analytic_ho_uncertainty(double t, double sigma, double m, double omega, double hbar) {
  const double w0 = hbar / (2.0 * m * sigma * sigma);
  const double c = std::cos(omega * t), s = std::sin(omega * t), s2 = std::sin(2.0 * omega * t);
  const double r = w0 / omega;
  return 0.5 * hbar * std::sqrt(c * c * c * c + s * s * s * s + 0.25 * (r * r + 1.0 / (r * r)) * s2 * s2);
}

}  // namespace cvq
