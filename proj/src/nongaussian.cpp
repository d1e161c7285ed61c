#include "cvqdyn/nongaussian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace cvq {

std::vector<double> reduced_potential(const CentralPotentialSpec& spec, int N, const Grid& grid) {
  const auto e = expand(spec, N);
  std::vector<double> v(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) v[i] = e.evaluate(grid.x(i), false);
  return v;
}

namespace {

double auto_half_width(const CentralPotentialSpec& spec, const GaussianState& g, double mu,
                       const ReducedRunOptions& o) {
  const double T = o.t_end;
  const double w2 = omega_squared(spec).signed_value();
  const double s = g.sigma / std::sqrt(2.0);  // single-particle width
  const double m = 2.0 * mu;
  double sd, drift;
  if (w2 > 0) {
    const auto r = relative_moments_freefall(T, std::sqrt(w2), s, -g.p0, spec.L, m, o.hbar);
    sd = std::sqrt(r.var_r);
    drift = std::abs(r.mean_r);
  } else {
    const double w0 = o.hbar / (2.0 * mu * g.sigma * g.sigma);
    sd = g.sigma * std::sqrt(1.0 + w0 * w0 * T * T);
    drift = std::abs(g.p0) * T / mu;
  }
  return std::abs(g.x0) + 12.0 * std::max(sd, g.sigma) + drift + 20.0 * o.dx;
}

}  // namespace

std::vector<Snapshot> evolve_reduced(const CentralPotentialSpec& spec, int N, const GaussianState& g_rel, double mu,
                                     const ReducedRunOptions& opts) {
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "expansion order must be at least 2");
  if (!(opts.dt > 0) || !(opts.dx > 0) || !(opts.t_end >= 0))
    throw Error(ErrorCode::InvalidArgument, "dt, dx must be positive and t_end non-negative");
  const double hw = opts.half_width > 0 ? opts.half_width : auto_half_width(spec, g_rel, mu, opts);
  const auto K = std::size_t(std::ceil(hw / opts.dx));
  const Grid grid(-double(K) * opts.dx, double(K) * opts.dx, 2 * K + 1);

  PotentialGrid pot;
  pot.values = reduced_potential(spec, N, grid);
  const BandedSystem sys(grid, pot, mu, opts.dt, opts.stencil, opts.hbar);

  std::vector<Snapshot> out;
  WaveFunction wf = make_gaussian(grid, g_rel, opts.hbar);
  out.push_back({0.0, wf});
  const auto n_steps = std::size_t(std::llround(opts.t_end / opts.dt));
  const std::size_t cadence = std::max<std::size_t>(1, opts.cadence);
  for (std::size_t s = 1; s <= n_steps; ++s) {
    sys.step_inplace(wf.psi);
    wf.time = double(s) * opts.dt;
    if (s % cadence == 0) {
      if (tail_mass(wf, 0.02) > 1e-8) {
        std::ostringstream os;
        os << "relative wave function reaches the box edge at t = " << wf.time;
        throw Error(ErrorCode::GridTooNarrow, os.str());
      }
      out.push_back({wf.time, wf});
    }
  }
  return out;
}

SchmidtResult schmidt_entropy(const Eigen::MatrixXcd& psi, double dx_A, double dx_B, const SchmidtOptions& opts) {
  const Eigen::MatrixXcd M = psi * std::sqrt(dx_A * dx_B);
  const double total = M.squaredNorm();
  if (std::abs(total - 1.0) > 1e-4) {
    std::ostringstream os;
    os << "two-body norm " << total;
    throw Error(ErrorCode::NotNormalized, os.str());
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  const std::size_t full = std::size_t(sv.size());
  const std::size_t cap = opts.max_rank == 0 ? full : std::min(full, opts.max_rank);

  SchmidtResult r;
  // rank grows until the retained weight reaches 1 - tol
  for (std::size_t k = 0; k < cap; ++k) {
    const double l = sv(Eigen::Index(k)) * sv(Eigen::Index(k)) / total;
    r.lambda.push_back(l);
    r.captured += l;
    if (r.captured >= 1.0 - opts.tol) break;
  }
  r.rank = r.lambda.size();
  if (r.captured < 1.0 - opts.tol) {
    std::ostringstream os;
    os << "rank " << r.rank << " captures only " << r.captured;
    throw Error(ErrorCode::RankExhausted, os.str());
  }
  for (double l : r.lambda)
    if (l > 0) r.entropy -= l * std::log2(l);
  return r;
}

std::vector<double> predict_amplified(const std::vector<double>& baseline, const std::vector<double>& eps3,
                                      double factor) {
  if (baseline.size() != eps3.size()) throw Error(ErrorCode::InvalidArgument, "series lengths differ");
  std::vector<double> out(baseline.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 + factor * eps3[i]) * baseline[i];
  return out;
}

WitnessSeries momentum_witness(const std::vector<double>& p, double dt, double threshold_fraction) {
  const std::size_t n = p.size();
  if (n < 5) throw Error(ErrorCode::InvalidArgument, "witness needs at least 5 samples");
  const double floor = threshold_fraction * std::abs(p.front());
  WitnessSeries w;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    if (std::abs(p[i]) < floor || p[i] == 0.0) {
      std::ostringstream os;
      os << "<p> = " << p[i] << " at sample " << i << " is below the threshold " << floor;
      throw Error(ErrorCode::ZeroMomentumCrossing, os.str());
    }
    const double d1 = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / (dt * dt);
    const double d2 = (p[i + 2] - 2.0 * p[i] + p[i - 2]) / (4.0 * dt * dt);
    w.index.push_back(i);
    w.ratio.push_back((4.0 * d1 - d2) / 3.0 / p[i]);
  }
  return w;
}

CovarianceMatrix covariance_from_wavefunctions(const MomentSet& com, const MomentSet& rel, double m, double hbar) {
  auto cov = covariance_from_moments(com, relative_from_moment_set(rel), m, m, hbar);
  check_physical(cov, 1e-6);
  return cov;
}

TwoBodyState two_body_snapshot(const ComDecomposition& dec, const Snapshot& snap, const MomentSet& rel,
                               double support) {
  const double dx = snap.wf.grid.dx();
  const double h = 2.0 * dx;
  const auto com = com_free_moments(dec, snap.t);
  const auto grid = lab_grid_from_com(com, rel, dec.m_A, dec.m_B, h, support);

  // centre-of-mass factor sampled on the same sub-lattice as the relative grid
  const double sd = std::sqrt(com.var_x);
  const double lo = std::floor((com.mean_x - (support + 4.0) * sd) / dx) * dx;
  const double hi = std::ceil((com.mean_x + (support + 4.0) * sd) / dx) * dx;
  WaveFunction phi;
  phi.grid = Grid(lo, hi, std::size_t(std::llround((hi - lo) / dx)) + 1);
  phi.psi.resize(phi.grid.n_points);
  const auto g = dec.com_state();
  for (std::size_t i = 0; i < phi.grid.n_points; ++i)
    phi.psi[i] = free_gaussian_amplitude(phi.grid.x(i), g, dec.M, snap.t, dec.hbar);
  return assemble_two_body(phi, snap.wf, dec.m_A, dec.m_B, grid);
}

EntanglementSeries numeric_entanglement(const NumericEntanglementConfig& cfg) {
  const double hbar = cfg.run.hbar;
  BipartiteSpec bs;
  bs.m_A = bs.m_B = cfg.m;
  bs.L = cfg.spec.L;
  bs.g_A = {0.0, cfg.sigma, cfg.p0 + 0.5 * cfg.P_com};
  bs.g_B = {0.0, cfg.sigma, -cfg.p0 + 0.5 * cfg.P_com};
  const auto dec = decompose(bs, hbar);

  const auto snaps = evolve_reduced(cfg.spec, cfg.order, dec.relative_state(), dec.mu, cfg.run);
  EntanglementSeries es;
  es.provenance = "numeric_N" + std::to_string(cfg.order);
  std::size_t k = 0;
  for (const auto& sn : snaps) {
    const auto rel = moments(sn.wf, hbar, dec.mu, cfg.run.stencil);
    const auto com = com_free_moments(dec, sn.t);
    const auto cov = covariance_from_wavefunctions(com, rel, cfg.m, hbar);
    es.t.push_back(sn.t);
    es.E.push_back(log_negativity(cov, 1e-6));
    es.S.push_back(entropy_from_covariance(cov));
    es.skewness.push_back(rel.skewness);
    es.mean_r.push_back(rel.mean_x);
    es.mean_p.push_back(rel.mean_p);
    es.covariance.push_back(cov);
    es.relative.push_back(rel);
    if (cfg.schmidt && k % std::max<std::size_t>(1, cfg.schmidt_every) == 0) {
      const auto tb = two_body_snapshot(dec, sn, rel, cfg.support);
      const auto sr = schmidt_entropy(tb.psi, tb.grid.A.dx(), tb.grid.B.dx());
      es.schmidt_t.push_back(sn.t);
      es.S_schmidt.push_back(sr.entropy);
      es.schmidt_captured.push_back(sr.captured);
      es.schmidt_rank.push_back(sr.rank);
    }
    ++k;
  }
  return es;
}

}  // namespace cvq
