#include "cvqdyn/frames.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cvq {

ComPoint to_com(const PhaseSpacePoint& u, double m_A, double m_B) {
  const double M = m_A + m_B;
  return {(m_A * u.x_A + m_B * u.x_B) / M, u.p_A + u.p_B, u.x_B - u.x_A, (m_A * u.p_B - m_B * u.p_A) / M};
}

PhaseSpacePoint from_com(const ComPoint& c, double m_A, double m_B) {
  const double M = m_A + m_B;
  PhaseSpacePoint u;
  u.x_A = c.R - m_B / M * c.r;
  u.x_B = c.R + m_A / M * c.r;
  u.p_A = m_A / M * c.P - c.p;
  u.p_B = m_B / M * c.P + c.p;
  return u;
}

ComDecomposition decompose(const BipartiteSpec& spec, double hbar) {
  if (!(spec.m_A > 0 && spec.m_B > 0)) throw Error(ErrorCode::InvalidArgument, "masses must be positive");
  if (!(spec.L > 0)) throw Error(ErrorCode::InvalidArgument, "separation must be positive");
  if (!(spec.g_A.sigma > 0 && spec.g_B.sigma > 0)) throw Error(ErrorCode::InvalidArgument, "widths must be positive");
  const double kA = spec.m_A * spec.g_A.sigma * spec.g_A.sigma;
  const double kB = spec.m_B * spec.g_B.sigma * spec.g_B.sigma;
  if (std::abs(kA - kB) / kA > 1e-9) {
    std::ostringstream os;
    os << "m_A sigma_A^2 = " << kA << " differs from m_B sigma_B^2 = " << kB;
    throw Error(ErrorCode::NotSeparable, os.str());
  }
  ComDecomposition d;
  d.m_A = spec.m_A;
  d.m_B = spec.m_B;
  d.M = spec.m_A + spec.m_B;
  d.mu = spec.m_A * spec.m_B / d.M;
  d.hbar = hbar;
  d.omega0 = hbar / (2.0 * kA);
  d.sigma_M = std::sqrt(hbar / (2.0 * d.M * d.omega0));
  d.sigma_mu = std::sqrt(hbar / (2.0 * d.mu * d.omega0));
  const auto c = to_com({spec.g_A.x0, spec.g_A.p0, spec.g_B.x0, spec.g_B.p0}, spec.m_A, spec.m_B);
  d.R0 = c.R;
  d.r0 = c.r;
  d.p_M0 = c.P;
  d.p_mu0 = c.p;
  return d;
}

MomentSet com_free_moments(const ComDecomposition& dec, double t) {
  MomentSet m;
  m.norm = 1;
  const double w = dec.omega0;
  m.mean_x = dec.R0 + dec.p_M0 * t / dec.M;
  m.mean_p = dec.p_M0;
  m.var_x = dec.sigma_M * dec.sigma_M * (1.0 + w * w * t * t);
  m.var_p = dec.hbar * dec.hbar / (4.0 * dec.sigma_M * dec.sigma_M);
  m.cov_xp = 0.5 * dec.hbar * w * t;
  return m;
}

MomentSet com_trapped_moments(const ComDecomposition& dec) {
  MomentSet m;
  m.norm = 1;
  m.mean_x = dec.R0;
  m.mean_p = dec.p_M0;
  m.var_x = dec.sigma_M * dec.sigma_M;
  m.var_p = dec.hbar * dec.hbar / (4.0 * dec.sigma_M * dec.sigma_M);
  m.cov_xp = 0;
  return m;
}

cplx free_gaussian_amplitude(double x, const GaussianState& g, double m, double t, double hbar) {
  const double s2 = g.sigma * g.sigma;
  const cplx q(1.0, hbar * t / (2.0 * m * s2));
  const double u = x - g.x0 - g.p0 * t / m;
  const double amp = std::pow(2.0 * std::numbers::pi * s2, -0.25);
  const cplx phase(0.0, g.p0 * (x - g.x0) / hbar - g.p0 * g.p0 * t / (2.0 * m * hbar));
  return amp / std::sqrt(q) * std::exp(-u * u / (4.0 * s2 * q) + phase);
}

TwoBodyGrid lab_grid_from_com(const MomentSet& com, const MomentSet& rel, double m_A, double m_B, double h,
                              double support) {
  const double M = m_A + m_B;
  const double ca = m_B / M, cb = m_A / M;
  const double mean_a = com.mean_x - ca * rel.mean_x, mean_b = com.mean_x + cb * rel.mean_x;
  const double sa = std::sqrt(com.var_x + ca * ca * rel.var_x);
  const double sb = std::sqrt(com.var_x + cb * cb * rel.var_x);
  // anchor both lattices on multiples of h so that x_B - x_A lands on multiples of h
  auto make = [&](double mean, double s) {
    const double lo = std::floor((mean - support * s) / h) * h;
    const double hi = std::ceil((mean + support * s) / h) * h;
    return Grid(lo, hi, std::size_t(std::llround((hi - lo) / h)) + 1);
  };
  return {make(mean_a, sa), make(mean_b, sb)};
}

cplx linear_sample(const WaveFunction& wf, double x) {
  const double h = wf.grid.dx();
  const double s = (x - wf.grid.x_min) / h;
  if (s < 0 || s > double(wf.size() - 1)) return 0.0;
  const auto i = std::size_t(std::floor(s));
  const double t = s - double(i);
  if (i + 1 >= wf.size()) return wf.psi.back();
  if (t < 1e-9) return wf.psi[i];
  return (1.0 - t) * wf.psi[i] + t * wf.psi[i + 1];
}

TwoBodyState assemble_two_body(const WaveFunction& phi, const WaveFunction& psi, double m_A, double m_B,
                               const TwoBodyGrid& grid) {
  const double M = m_A + m_B;
  TwoBodyState st;
  st.grid = grid;
  const std::size_t na = grid.A.n_points, nb = grid.B.n_points;
  st.psi.resize(Eigen::Index(na), Eigen::Index(nb));
  double acc = 0;
  for (std::size_t j = 0; j < nb; ++j) {
    const double xb = grid.B.x(j);
    for (std::size_t i = 0; i < na; ++i) {
      const double xa = grid.A.x(i);
      const cplx v = linear_sample(phi, (m_A * xa + m_B * xb) / M) * linear_sample(psi, xb - xa);
      st.psi(Eigen::Index(i), Eigen::Index(j)) = v;
      acc += std::norm(v);
    }
  }
  st.norm = acc * grid.A.dx() * grid.B.dx();
  if (std::abs(st.norm - 1.0) > 1e-4) {
    std::ostringstream os;
    os << "two-body norm " << st.norm << " inside the window";
    throw Error(ErrorCode::SupportClipped, os.str());
  }
  return st;
}

}  // namespace cvq
