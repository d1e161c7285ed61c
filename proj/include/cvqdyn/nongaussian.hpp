#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cvqdyn/core.hpp"
#include "cvqdyn/frames.hpp"
#include "cvqdyn/gaussian.hpp"
#include "cvqdyn/potentials.hpp"
#include "cvqdyn/tdse.hpp"

namespace cvq {

struct ReducedRunOptions {
  double t_end = 1;
  double dt = 1e-3;
  double dx = 0.05;
  std::size_t cadence = 100;  // steps between snapshots
  Stencil stencil = Stencil::Penta;
  double half_width = 0;      // relative grid half-width; chosen from the expected spread when 0
  double hbar = 1;
};

struct Snapshot {
  double t = 0;
  WaveFunction wf;
};

// Potential of the relative coordinate truncated at order N, constant dropped.
std::vector<double> reduced_potential(const CentralPotentialSpec& spec, int N, const Grid& grid);

// Relative-coordinate evolution under the order-N expansion. Snapshots at
// t = 0 and every `cadence` steps. g_rel is in displacement coordinates.
std::vector<Snapshot> evolve_reduced(const CentralPotentialSpec& spec, int N, const GaussianState& g_rel, double mu,
                                     const ReducedRunOptions& opts);

struct SchmidtResult {
  std::vector<double> lambda;  // descending
  std::size_t rank = 0;
  double captured = 0;         // sum of retained lambda
  double entropy = 0;
};

struct SchmidtOptions {
  double tol = 1e-7;
  std::size_t max_rank = 0;  // 0 means full rank
};

SchmidtResult schmidt_entropy(const Eigen::MatrixXcd& psi, double dx_A, double dx_B, const SchmidtOptions& opts = {});

std::vector<double> predict_amplified(const std::vector<double>& baseline, const std::vector<double>& eps3,
                                      double factor);
inline std::vector<double> predict_entropy(const std::vector<double>& S0, const std::vector<double>& eps3) {
  return predict_amplified(S0, eps3, 1.0);
}
inline std::vector<double> predict_negativity(const std::vector<double>& E0, const std::vector<double>& eps3) {
  return predict_amplified(E0, eps3, 0.5);
}

struct WitnessSeries {
  std::vector<std::size_t> index;  // sample index of each ratio
  std::vector<double> ratio;
};

// (1/<p>) d^2<p>/dt^2 on uniformly spaced samples, Richardson-refined.
WitnessSeries momentum_witness(const std::vector<double>& mean_p, double dt, double threshold_fraction = 1e-3);

CovarianceMatrix covariance_from_wavefunctions(const MomentSet& com, const MomentSet& rel, double m, double hbar);

// Full numeric pipeline for two identical masses m, each of width sigma,
// approaching with relative momentum p0 (relative state carries -p0).
struct NumericEntanglementConfig {
  CentralPotentialSpec spec;
  int order = 2;
  double m = 1;
  double sigma = 1;
  double p0 = 0;
  double P_com = 0;        // common boost of the pair
  ReducedRunOptions run;
  bool schmidt = false;
  std::size_t schmidt_every = 1;  // Schmidt at every k-th snapshot
  double support = 7.0;
};

struct EntanglementSeries {
  std::string provenance;
  std::vector<double> t, E, S, skewness, mean_r, mean_p;
  std::vector<double> S_schmidt, schmidt_captured;  // NaN-free; only filled where computed
  std::vector<double> schmidt_t;
  std::vector<std::size_t> schmidt_rank;
  std::vector<CovarianceMatrix> covariance;
  std::vector<MomentSet> relative;
};

EntanglementSeries numeric_entanglement(const NumericEntanglementConfig& cfg);

// Psi(x_A, x_B, t) on the lab lattice for one snapshot.
TwoBodyState two_body_snapshot(const ComDecomposition& dec, const Snapshot& snap, const MomentSet& rel,
                               double support);

}  // namespace cvq
