#include "cvqdyn/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cvq {

namespace {

constexpr double pi = std::numbers::pi;
const double ln2 = std::numbers::ln2;

double xlog2x(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

double det2(const Eigen::Matrix2d& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

void require_trap_stable(double omega, double omega0) {
  if (!(omega < omega0)) {
    std::ostringstream os;
    os << "coupling omega = " << omega << " is not below the trap frequency " << omega0;
    throw Error(ErrorCode::TrapUnstable, os.str());
  }
}

}  // namespace

RelativeMoments relative_moments_freefall(double t, double omega, double sigma, double p0, double L, double m,
                                          double hbar) {
  const double w0 = hbar / (2.0 * m * sigma * sigma);
  const double ch = std::cosh(omega * t), sh = std::sinh(omega * t);
  RelativeMoments r;
  r.mean_r = 0.5 * L * (1.0 - ch) - 2.0 * p0 / (m * omega) * sh;
  r.mean_p = -p0 * ch - 0.25 * m * omega * L * sh;
  r.var_r = 2.0 * sigma * sigma * (ch * ch + w0 * w0 / (omega * omega) * sh * sh);
  r.var_p = hbar * hbar / (8.0 * sigma * sigma) * (ch * ch + omega * omega / (w0 * w0) * sh * sh);
  r.cov_rp = 0.25 * hbar * (w0 / omega + omega / w0) * std::sinh(2.0 * omega * t);
  return r;
}

RelativeMoments relative_moments_freefall_long(double t, double omega, double sigma, double p0, double L, double m,
                                               double hbar) {
  const double wt = omega * t;
  const double ch = std::cosh(wt), sh = std::sinh(wt);
  const double ch2 = std::cosh(2 * wt), sh2 = std::sinh(2 * wt);
  const double s2 = sigma * sigma;
  const double q = p0 * p0 + hbar * hbar / (8.0 * s2);
  RelativeMoments r;
  r.mean_r = 0.5 * L * (1.0 - ch) - 2.0 * p0 / (m * omega) * sh;
  r.mean_p = -p0 * ch - 0.25 * m * omega * L * sh;
  const double r2 = 2.0 * s2 * (1.0 + sh * sh) + L * L / 8.0 * (3.0 + ch2 - 4.0 * ch) +
                    L * p0 / (m * omega) * (sh2 - 2.0 * sh) + 4.0 / (m * m * omega * omega) * q * sh * sh;
  const double p2 = q * (1.0 + sh * sh) + 0.25 * m * omega * L * p0 * sh2 +
                    0.25 * m * m * omega * omega * (2.0 * s2 + 0.25 * L * L) * sh * sh;
  const double rp = 0.5 * (L * p0 * (ch2 - ch) + m * omega * L * L / 8.0 * (sh2 - 2.0 * sh) +
                           2.0 / (m * omega) * (q + 0.5 * m * m * omega * omega * s2) * sh2);
  r.var_r = r2 - r.mean_r * r.mean_r;
  r.var_p = p2 - r.mean_p * r.mean_p;
  r.cov_rp = rp - r.mean_r * r.mean_p;
  return r;
}

RelativeMoments relative_moments_continued(double t, std::complex<double> omega, double sigma, double m,
                                           double hbar) {
  const double w0 = hbar / (2.0 * m * sigma * sigma);
  const auto ch = std::cosh(omega * t), sh = std::sinh(omega * t);
  RelativeMoments r;
  r.var_r = (2.0 * sigma * sigma * (ch * ch + w0 * w0 / (omega * omega) * sh * sh)).real();
  r.var_p = (hbar * hbar / (8.0 * sigma * sigma) * (ch * ch + omega * omega / (w0 * w0) * sh * sh)).real();
  r.cov_rp = (0.25 * hbar * (w0 / omega + omega / w0) * std::sinh(2.0 * omega * t)).real();
  return r;
}

RelativeMoments relative_moments_trapped(double t, double omega, double sigma, double m, double hbar) {
  const double w0 = hbar / (2.0 * m * sigma * sigma);
  require_trap_stable(omega, w0);
  const double d = w0 * w0 - omega * omega;
  const double W = std::sqrt(d);
  const double c = std::cos(W * t), s = std::sin(W * t);
  RelativeMoments r;
  r.var_r = 2.0 * sigma * sigma / d * (w0 * w0 - omega * omega * c * c);
  r.var_p = hbar * hbar / (8.0 * sigma * sigma * w0 * w0) * (w0 * w0 - omega * omega * s * s);
  r.cov_rp = hbar * omega * omega / (4.0 * w0 * W) * std::sin(2.0 * W * t);
  return r;
}

CovarianceMatrix covariance_from_entries(double s00, double s01, double s02, double s03, double s11, double s13,
                                         double hbar) {
  CovarianceMatrix c;
  c.hbar = hbar;
  auto& s = c.s;
  s(0, 0) = s(2, 2) = s00;
  s(1, 1) = s(3, 3) = s11;
  s(0, 1) = s(1, 0) = s(2, 3) = s(3, 2) = s01;
  s(0, 2) = s(2, 0) = s02;
  s(1, 3) = s(3, 1) = s13;
  s(0, 3) = s(3, 0) = s(1, 2) = s(2, 1) = s03;
  return c;
}

CovarianceMatrix covariance_freefall(double t, double omega, double omega0, double m, double hbar) {
  const double sh = std::sinh(omega * t);
  const double k = omega0 / omega + omega / omega0;
  const double x = hbar / (4.0 * m * omega0), p = m * hbar * omega0 / 4.0;
  const double a = 1.0 + omega0 * omega0 / (omega * omega);
  const double b = 1.0 + omega * omega / (omega0 * omega0);
  const double w0t = omega0 * t;
  return covariance_from_entries(x * (2.0 + w0t * w0t + a * sh * sh), hbar / 8.0 * (2.0 * w0t + k * std::sinh(2 * omega * t)),
                                 x * (w0t * w0t - a * sh * sh), hbar / 8.0 * (2.0 * w0t - k * std::sinh(2 * omega * t)),
                                 p * (2.0 + b * sh * sh), -p * b * sh * sh, hbar);
}

CovarianceMatrix covariance_trapped(double t, double omega, double omega0, double m, double hbar) {
  require_trap_stable(omega, omega0);
  const double d = omega0 * omega0 - omega * omega;
  const double W = std::sqrt(d);
  const double s = std::sin(W * t);
  const double s2 = s * s;
  const double w2 = omega * omega;
  const double x = hbar / (4.0 * m * omega0);
  const double c01 = hbar * w2 / (8.0 * omega0 * W) * std::sin(2.0 * W * t);
  return covariance_from_entries(x * (2.0 + w2 / d * s2), c01, -x * w2 / d * s2, -c01,
                                 m * hbar * omega0 / 4.0 * (2.0 - w2 / (omega0 * omega0) * s2),
                                 m * hbar * w2 / (4.0 * omega0) * s2, hbar);
}

CovarianceMatrix covariance_repulsive(double t, double omega, double omega0, double m, double hbar,
                                      bool time_averaged) {
  const double s2 = time_averaged ? 0.5 : std::pow(std::sin(omega * t), 2);
  const double sin2 = time_averaged ? 0.0 : std::sin(2.0 * omega * t);
  const double a = 1.0 - omega0 * omega0 / (omega * omega);
  const double b = 1.0 - omega * omega / (omega0 * omega0);
  const double k = omega0 / omega - omega / omega0;
  const double x = hbar / (4.0 * m * omega0), p = m * hbar * omega0 / 4.0;
  const double w0t = omega0 * t;
  return covariance_from_entries(x * (2.0 + w0t * w0t - a * s2), hbar / 8.0 * (2.0 * w0t + k * sin2),
                                 x * (w0t * w0t + a * s2), hbar / 8.0 * (2.0 * w0t - k * sin2), p * (2.0 - b * s2),
                                 p * b * s2, hbar);
}

CovarianceMatrix covariance_from_moments(const MomentSet& com, const RelativeMoments& rel, double m_A, double m_B,
                                         double hbar) {
  if (std::abs(m_A - m_B) > 1e-12 * std::max(std::abs(m_A), std::abs(m_B)))
    throw Error(ErrorCode::InvalidArgument, "covariance assembly is implemented for identical masses only");
  return covariance_from_entries(com.var_x + 0.25 * rel.var_r, 0.5 * com.cov_xp + 0.5 * rel.cov_rp,
                                 com.var_x - 0.25 * rel.var_r, 0.5 * com.cov_xp - 0.5 * rel.cov_rp,
                                 0.25 * com.var_p + rel.var_p, 0.25 * com.var_p - rel.var_p, hbar);
}

RelativeMoments relative_from_moment_set(const MomentSet& m) {
  RelativeMoments r;
  r.mean_r = m.mean_x;
  r.mean_p = m.mean_p;
  r.var_r = m.var_x;
  r.var_p = m.var_p;
  r.cov_rp = m.cov_xp;
  return r;
}

SymplecticPair symplectic_eigs(const CovarianceMatrix& cov, bool partial_transpose) {
  const double da = det2(cov.alpha()), db = det2(cov.beta()), dg = det2(cov.gamma());
  const double D = cov.det();
  const double S = da + db + (partial_transpose ? -2.0 : 2.0) * dg;
  double disc = S * S - 4.0 * D;
  if (disc < 0) {
    if (disc < -1e-8 * S * S) {
      std::ostringstream os;
      os << "symplectic discriminant " << disc << " is negative (Sigma = " << S << ", Det = " << D << ")";
      throw Error(ErrorCode::NonPhysical, os.str());
    }
    disc = 0;
  }
  const double root = std::sqrt(disc);
  SymplecticPair p;
  if (root > 1e-3 * S) {
    const double big = 0.5 * (S + root);
    p.plus = std::sqrt(std::max(0.0, big));
    p.minus = big > 0 ? std::sqrt(std::max(0.0, D / big)) : 0.0;
    return p;
  }
  // Near-degenerate pair: the root above moves as sqrt(roundoff). The squared
  // eigenvalues of s^1/2 O^T s O s^1/2 are Lipschitz in the entries instead.
  // local squeeze and 1/hbar bring every entry to order one without moving
  // the symplectic spectrum (SI matrices span some 30 decades otherwise)
  Eigen::Vector4d d;
  for (int j = 0; j < 2; ++j) {
    const double a = std::sqrt(cov.s(2 * j, 2 * j) / cov.s(2 * j + 1, 2 * j + 1));
    d(2 * j) = 1.0 / std::sqrt(a);
    d(2 * j + 1) = std::sqrt(a);
  }
  Eigen::Matrix4d s = d.asDiagonal() * cov.s * d.asDiagonal() / cov.hbar;
  if (partial_transpose) {
    s.row(3) *= -1.0;
    s.col(3) *= -1.0;
  }
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega(0, 1) = omega(2, 3) = 1.0;
  omega(1, 0) = omega(3, 2) = -1.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> half(s);
  if (half.eigenvalues().minCoeff() <= 0) throw Error(ErrorCode::NonPhysical, "covariance matrix is not positive");
  const Eigen::Matrix4d r = half.operatorSqrt();
  const Eigen::Matrix4d k = r * omega.transpose() * s * omega * r;
  const Eigen::Vector4d l = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(0.5 * (k + k.transpose()), Eigen::EigenvaluesOnly)
                                .eigenvalues();
  p.minus = cov.hbar * std::sqrt(std::max(0.0, 0.5 * (l(0) + l(1))));
  p.plus = cov.hbar * std::sqrt(std::max(0.0, 0.5 * (l(2) + l(3))));
  return p;
}

void check_physical(const CovarianceMatrix& cov, double tol) {
  const auto p = symplectic_eigs(cov, false);
  if (p.minus < 0.5 * cov.hbar * (1.0 - tol)) {
    std::ostringstream os;
    os << "symplectic eigenvalue " << p.minus << " below hbar/2 = " << 0.5 * cov.hbar;
    throw Error(ErrorCode::NonPhysical, os.str());
  }
}

double log_negativity(const CovarianceMatrix& cov, double physical_tol) {
  check_physical(cov, physical_tol);
  const auto p = symplectic_eigs(cov, true);
  const double nu = std::max(p.minus, 1e-30 * cov.hbar);
  return std::max(0.0, -std::log2(nu / (0.5 * cov.hbar)));
}

double entropy_function(double x) { return xlog2x(x + 0.5) - xlog2x(x - 0.5); }

double entropy_function_excess(double y) {
  if (y <= 0) return 0.0;
  return (std::log1p(y) + y * std::log1p(1.0 / y)) / ln2;
}

double entropy_from_covariance(const CovarianceMatrix& cov) {
  const double da = std::max(0.0, det2(cov.alpha()));
  const double x = std::max(0.5, std::sqrt(da) / cov.hbar);
  return std::max(0.0, entropy_function(x));
}

double negativity_small_time(double t, double omega, double omega0) {
  const double y = omega0 * omega * omega / 6.0 * t * t * t;
  // 1 + 2y^2 - 2y sqrt(1+y^2) = (sqrt(1+y^2) - y)^2
  return std::asinh(y) / ln2;
}

double trapped_negativity_exact(double t, double omega, double omega0) {
  require_trap_stable(omega, omega0);
  const double d = omega0 * omega0 - omega * omega;
  const double s = std::sin(std::sqrt(d) * t);
  const double e = std::pow(omega, 4) / (4.0 * omega0 * omega0 * d) * s * s;
  // -1/2 log2(1 + 2e - 2 sqrt(e^2 + e)) = asinh(sqrt(e)) / ln 2
  return std::asinh(std::sqrt(e)) / ln2;
}

double trapped_entropy_exact(double t, double omega, double omega0) {
  require_trap_stable(omega, omega0);
  const double d = omega0 * omega0 - omega * omega;
  const double s = std::sin(std::sqrt(d) * t);
  const double e = std::pow(omega, 4) / (4.0 * omega0 * omega0 * d) * s * s;
  return entropy_function_excess(0.5 * e / (std::sqrt(1.0 + e) + 1.0));
}

namespace {

// sinh u - u cosh u without the cancellation at small u
double sinh_minus_ucosh(double u) {
  if (std::abs(u) > 0.5) return std::sinh(u) - u * std::cosh(u);
  double term = u, sum = 0;
  for (int n = 1; n < 20; ++n) {
    term *= u * u / double((2 * n) * (2 * n + 1));
    sum -= 2.0 * n * term;
    if (std::abs(2.0 * n * term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

namespace {

void require_freefall(double omega, double omega0) {
  if (!(omega > 0) || !(omega0 > 0)) throw Error(ErrorCode::InvalidArgument, "frequencies must be positive");
}

// log Q for omega t beyond the reach of sinh; Q = sinh^2 u (r^2 + 2 h + u^2 + h^2 / r^2), h = 1 - u coth u
double freefall_log_q(double u, double r) {
  const double h = 1.0 - u / std::tanh(u);
  const double log_s = u - std::log(2.0) + std::log1p(-std::exp(-2.0 * u));
  return 2.0 * log_s + std::log(r * r + 2.0 * h + u * u + h * h / (r * r));
}

constexpr double kLogRange = 40.0;

}  // namespace

double freefall_q(double t, double omega, double omega0) {
  require_freefall(omega, omega0);
  const double u = omega * t, r = omega / omega0;
  if (u > kLogRange) return std::exp(freefall_log_q(u, r));
  const double S = std::sinh(u), g = sinh_minus_ucosh(u);
  return r * r * S * S + 2.0 * S * g + u * u * S * S + g * g / (r * r);
}

double freefall_negativity_exact(double t, double omega, double omega0) {
  require_freefall(omega, omega0);
  if (omega * t > kLogRange) {
    const double lq = freefall_log_q(omega * t, omega / omega0);
    // asinh(sqrt(Q)/2) = log sqrt(Q) + O(1/Q)
    if (lq > 80.0) return 0.5 * lq / ln2;
  }
  return std::asinh(0.5 * std::sqrt(freefall_q(t, omega, omega0))) / ln2;
}

double freefall_entropy_exact(double t, double omega, double omega0) {
  require_freefall(omega, omega0);
  if (omega * t > kLogRange) {
    const double lq = freefall_log_q(omega * t, omega / omega0);
    // x - 1/2 = sqrt(Q)/4 + O(1), and the entropy is log2(x - 1/2) + 1/ln2 + O(1/x)
    if (lq > 80.0) return (0.5 * lq - std::log(4.0) + 1.0) / ln2;
  }
  const double q = 0.25 * freefall_q(t, omega, omega0);
  return entropy_function_excess(0.5 * q / (std::sqrt(1.0 + q) + 1.0));
}

double trapped_negativity_approx(double t, double omega, double omega0) {
  return omega * omega / (2.0 * ln2 * omega0 * omega0) * std::sin(omega0 * t);
}

double trapped_entropy_approx(double t, double omega, double omega0) {
  const double s = std::sin(omega0 * t);
  if (s * s <= 0) return 0.0;
  const double r = omega / omega0;
  return std::pow(r, 4) / 16.0 * s * s * (1.0 - 4.0 * std::log2(0.5 * r * std::sqrt(std::abs(s))));
}

double trapped_first_maximum(double omega, double omega0) {
  require_trap_stable(omega, omega0);
  return pi / (2.0 * std::sqrt(omega0 * omega0 - omega * omega));
}

double trapped_matrix_period(double omega, double omega0) {
  require_trap_stable(omega, omega0);
  return pi / std::sqrt(omega0 * omega0 - omega * omega);
}

double thermal_occupation(double temperature, double omega0, double hbar, double kB) {
  if (temperature < 0) throw Error(ErrorCode::InvalidArgument, "temperature must be non-negative");
  if (temperature == 0) return 0.0;
  const double x = hbar * omega0 / (kB * temperature);
  if (x > 700) return 0.0;
  return 1.0 / std::expm1(x);
}

double ThermalSpec::nbar() const { return thermal_occupation(temperature, omega0, hbar, kB); }

CovarianceMatrix thermal_scale(const CovarianceMatrix& cov, double nbar) {
  if (nbar < 0) throw Error(ErrorCode::InvalidArgument, "phonon number must be non-negative");
  CovarianceMatrix out = cov;
  out.s *= 2.0 * nbar + 1.0;
  return out;
}

double thermal_negativity(double E0, double nbar) {
  if (nbar < 0) throw Error(ErrorCode::InvalidArgument, "phonon number must be non-negative");
  return std::max(0.0, E0 - std::log2(2.0 * nbar + 1.0));
}

double trapped_thermal_amplitude(double omega, double omega0, double nbar) {
  return std::max(0.0, omega * omega / (2.0 * ln2 * omega0 * omega0) - std::log2(2.0 * nbar + 1.0));
}

MondWitness mond_witness_params(double m, double L, double omega0, double a_N, double hbar, double kB, double a0) {
  (void)m;
  const double arg = omega0 * omega0 * L / a_N;
  if (!(arg > 1.0)) {
    std::ostringstream os;
    os << "omega0^2 L / a_N = " << arg << " must exceed 1";
    throw Error(ErrorCode::DomainError, os.str());
  }
  MondWitness w;
  w.T0 = hbar * omega0 / (kB * std::log(arg));
  w.residual = 2.0 * std::sqrt(a_N * a0) / (omega0 * omega0 * L * ln2) *
               (2.0 / 3.0 * (std::sqrt(2.0) - 1.0) - std::sqrt(a_N / a0));
  return w;
}

double thermal_position_density(double x, double mean, double sigma_trap, double nbar) {
  const double v = sigma_trap * sigma_trap * (2.0 * nbar + 1.0);
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * pi * v);
}

double thermal_momentum_density(double p, double mean, double sigma_trap, double nbar, double hbar) {
  const double v = hbar * hbar / (4.0 * sigma_trap * sigma_trap) * (2.0 * nbar + 1.0);
  const double d = p - mean;
  return std::exp(-d * d / (2.0 * v)) / std::sqrt(2.0 * pi * v);
}

double wigner_thermal(const Eigen::Vector4d& u, const Eigen::Vector4d& mean, const CovarianceMatrix& cov,
                      double nbar) {
  const double D = cov.det();
  const double h4 = std::pow(0.5 * cov.hbar, 4);
  if (!(D > 1e-12 * h4)) throw Error(ErrorCode::SingularCovariance, "covariance matrix is not invertible");
  const double k = 2.0 * nbar + 1.0;
  const Eigen::Vector4d d = u - mean;
  const double q = d.dot(cov.s.ldlt().solve(d));
  // general Gaussian normalisation; equals 1/(pi^2 hbar^2 k^2) for a pure covariance
  return std::exp(-q / (2.0 * k)) / (4.0 * pi * pi * k * k * std::sqrt(D));
}

}  // namespace cvq
