#pragma once

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "cvqdyn/core.hpp"

namespace cvq {

struct RelativeMoments {
  double mean_r = 0, mean_p = 0;
  double var_r = 0, var_p = 0, cov_rp = 0;
};

// Quadratic (N = 2) attractive coupling, identical masses m with initial
// spread sigma each. Short forms depend on neither p0 nor L.
RelativeMoments relative_moments_freefall(double t, double omega, double sigma, double p0, double L, double m,
                                          double hbar);
// The same moments from the raw second moments minus squared means.
RelativeMoments relative_moments_freefall_long(double t, double omega, double sigma, double p0, double L, double m,
                                               double hbar);
// Centred moments with a complex coupling frequency; omega = i w gives the
// trigonometric continuation.
RelativeMoments relative_moments_continued(double t, std::complex<double> omega, double sigma, double m, double hbar);
// Relative motion inside traps of frequency omega0 with the coupling omega.
RelativeMoments relative_moments_trapped(double t, double omega, double sigma, double m, double hbar);

// 4x4 covariance over (x_A, p_A, x_B, p_B).
struct CovarianceMatrix {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  double hbar = 1;

  Eigen::Matrix2d alpha() const { return s.block<2, 2>(0, 0); }
  Eigen::Matrix2d beta() const { return s.block<2, 2>(2, 2); }
  Eigen::Matrix2d gamma() const { return s.block<2, 2>(0, 2); }
  double det() const { return s.determinant(); }
  double operator()(int i, int j) const { return s(i, j); }
};

// Fill the symmetric matrix from the six independent entries of the
// identical-mass form.
CovarianceMatrix covariance_from_entries(double s00, double s01, double s02, double s03, double s11, double s13,
                                         double hbar);

CovarianceMatrix covariance_freefall(double t, double omega, double omega0, double m, double hbar);
CovarianceMatrix covariance_trapped(double t, double omega, double omega0, double m, double hbar);
CovarianceMatrix covariance_repulsive(double t, double omega, double omega0, double m, double hbar,
                                      bool time_averaged = false);

// Assemble from centre-of-mass moments (mass 2m) and relative moments.
CovarianceMatrix covariance_from_moments(const MomentSet& com, const RelativeMoments& rel, double m_A, double m_B,
                                         double hbar);
RelativeMoments relative_from_moment_set(const MomentSet& m);

struct SymplecticPair {
  double minus = 0, plus = 0;
};

SymplecticPair symplectic_eigs(const CovarianceMatrix& cov, bool partial_transpose);
// Throws NonPhysical unless both untransposed eigenvalues reach hbar/2 (1 - tol).
// A pure state sits exactly on the bound, so the tolerance absorbs the
// discretization error of lattice moments.
void check_physical(const CovarianceMatrix& cov, double tol = 1e-6);

double log_negativity(const CovarianceMatrix& cov, double physical_tol = 1e-6);
double entropy_function(double x);
// the same with x = 1/2 + y, accurate for small y
double entropy_function_excess(double y);
double entropy_from_covariance(const CovarianceMatrix& cov);

// Closed forms
double negativity_small_time(double t, double omega, double omega0);
double trapped_negativity_exact(double t, double omega, double omega0);
double trapped_entropy_exact(double t, double omega, double omega0);
// Free fall: Det alpha = Det beta = (hbar^2/16)(4 + Q), Det gamma = -(hbar^2/16) Q.
// Cancellation-free where the covariance entries are not (omega0 t >> 1).
double freefall_q(double t, double omega, double omega0);
double freefall_negativity_exact(double t, double omega, double omega0);
double freefall_entropy_exact(double t, double omega, double omega0);
double trapped_negativity_approx(double t, double omega, double omega0);
double trapped_entropy_approx(double t, double omega, double omega0);
// First maximum of the trapped negativity and the actual repeat time of the matrix.
double trapped_first_maximum(double omega, double omega0);
double trapped_matrix_period(double omega, double omega0);

// Thermal scaling
struct ThermalSpec {
  double temperature = 0;
  double omega0 = 0;
  double hbar = Constants::hbar;
  double kB = Constants::boltzmann_kB;

  double nbar() const;
};

double thermal_occupation(double temperature, double omega0, double hbar = Constants::hbar,
                          double kB = Constants::boltzmann_kB);
CovarianceMatrix thermal_scale(const CovarianceMatrix& cov, double nbar);
double thermal_negativity(double E0, double nbar);
double trapped_thermal_amplitude(double omega, double omega0, double nbar);

struct MondWitness {
  double T0 = 0;         // Newtonian trapped amplitude vanishes here
  double residual = 0;   // MOND amplitude left at T0
};

MondWitness mond_witness_params(double m, double L, double omega0, double a_N, double hbar = Constants::hbar,
                                double kB = Constants::boltzmann_kB, double a0 = Constants::mond_a0);

double thermal_position_density(double x, double mean, double sigma_trap, double nbar);
double thermal_momentum_density(double p, double mean, double sigma_trap, double nbar, double hbar);

// Two-mode thermal Wigner function with pure-state covariance cov scaled by 2nbar+1.
double wigner_thermal(const Eigen::Vector4d& u, const Eigen::Vector4d& mean, const CovarianceMatrix& cov,
                      double nbar);

}  // namespace cvq
