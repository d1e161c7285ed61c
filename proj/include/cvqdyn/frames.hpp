#pragma once

#include <Eigen/Dense>

#include "cvqdyn/core.hpp"

namespace cvq {

struct BipartiteSpec {
  double m_A = 1, m_B = 1;
  GaussianState g_A, g_B;
  double L = 1;
};

struct ComDecomposition {
  double M = 0, mu = 0;
  double m_A = 0, m_B = 0;
  double sigma_M = 0, sigma_mu = 0;
  double R0 = 0, r0 = 0;
  double p_M0 = 0, p_mu0 = 0;
  double omega0 = 0;
  double hbar = 1;

  GaussianState com_state() const { return {R0, sigma_M, p_M0}; }
  GaussianState relative_state() const { return {r0, sigma_mu, p_mu0}; }
};

struct PhaseSpacePoint {
  double x_A = 0, p_A = 0, x_B = 0, p_B = 0;
};

struct ComPoint {
  double R = 0, P = 0, r = 0, p = 0;
};

ComPoint to_com(const PhaseSpacePoint& u, double m_A, double m_B);
PhaseSpacePoint from_com(const ComPoint& c, double m_A, double m_B);

ComDecomposition decompose(const BipartiteSpec& spec, double hbar);

// Exact moments of the centre-of-mass packet. With the traps kept on the
// packet is the trap ground state and does not evolve.
MomentSet com_free_moments(const ComDecomposition& dec, double t);
MomentSet com_trapped_moments(const ComDecomposition& dec);

// Analytic free Gaussian packet of mass m at time t.
cplx free_gaussian_amplitude(double x, const GaussianState& g, double m, double t, double hbar);

struct TwoBodyGrid {
  Grid A, B;
};

struct TwoBodyState {
  TwoBodyGrid grid;
  Eigen::MatrixXcd psi;  // psi(i, j) = Psi(x_A[i], x_B[j])
  double norm = 0;
};

// Lab window covering 7 spreads of both marginals, with spacing h.
TwoBodyGrid lab_grid_from_com(const MomentSet& com, const MomentSet& rel, double m_A, double m_B, double h,
                              double support = 7.0);

// Psi(x_A, x_B) = phi(R) psi(r) with linear interpolation of each factor.
TwoBodyState assemble_two_body(const WaveFunction& phi, const WaveFunction& psi, double m_A, double m_B,
                               const TwoBodyGrid& grid);

cplx linear_sample(const WaveFunction& wf, double x);

}  // namespace cvq
