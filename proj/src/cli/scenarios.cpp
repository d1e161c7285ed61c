#include "cvqdyn/cli/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "cvqdyn/core.hpp"
#include "cvqdyn/gaussian.hpp"
#include "cvqdyn/nongaussian.hpp"
#include "cvqdyn/potentials.hpp"
#include "cvqdyn/scattering.hpp"
#include "cvqdyn/tdse.hpp"

namespace cvq::cli {

namespace {

Stencil stencil_of(const std::string& s) { return s == "tri" ? Stencil::Tri : Stencil::Penta; }

std::string fmt(double v) { return format_number(v); }

void add_check(RunResult& r, std::string name, bool pass, const std::string& detail = "") {
  r.checks.push_back({std::move(name), pass, detail});
}

std::string show(double value, double limit) {
  std::ostringstream os;
  os << value << " (limit " << limit << ")";
  return os.str();
}

// ---------------------------------------------------------------- evolve, box

void run_evolve(const ScenarioConfig& c, RunResult& res) {
  const double m = c.number("physics.mass"), hbar = c.number("physics.hbar");
  const double sigma = c.number("physics.sigma"), x0 = c.number("physics.x0"), p0 = c.number("physics.p0");
  const double omega = c.number("physics.omega"), T = c.number("physics.t_end");
  const double dx = c.number("solver.dx"), dt = c.number("solver.dt");
  const auto cadence = std::size_t(c.integer("solver.cadence"));
  const Stencil st = stencil_of(c.string("solver.stencil"));
  if (omega < 0) throw ConfigError("physics.omega", "field 'physics.omega' must be non-negative");

  double lo, hi;
  if (omega > 0) {
    const double smax = std::max(sigma, hbar / (2.0 * m * omega * sigma));
    const double amp = std::hypot(x0, p0 / (m * omega));
    const double hw = c.has("solver.half_width") ? c.number("solver.half_width") : 12.0 * smax;
    lo = -amp - hw;
    hi = amp + hw;
  } else {
    const double xe = x0 + p0 * T / m;
    const double hw = c.has("solver.half_width") ? c.number("solver.half_width")
                                                 : 12.0 * sigma * std::sqrt(1.0 + std::pow(hbar * T / (2 * m * sigma * sigma), 2));
    lo = std::min(x0, xe) - hw;
    hi = std::max(x0, xe) + hw;
  }
  const Grid grid = Grid::with_spacing(lo, hi, dx);
  const auto pot = PotentialGrid::sample(grid, [&](double x) { return 0.5 * m * omega * omega * x * x; });
  const BandedSystem sys(grid, pot, m, dt, st, hbar);
  WaveFunction wf = make_gaussian(grid, {x0, sigma, p0}, hbar);

  CsvTable tab({"t", "norm", "mean_x", "mean_p", "var_x", "var_p", "uncertainty", "uncertainty_exact", "energy"},
               {"time", "1", "length", "momentum", "length^2", "momentum^2", "hbar", "hbar", "energy"});
  tab.meta("scenario", "evolve");
  tab.meta("grid", fmt(grid.x_min) + ".." + fmt(grid.x_max) + " n=" + std::to_string(grid.n_points));
  const double e0 = energy(sys, wf), n0 = norm(wf);
  double norm_dev = 0, e_dev = 0;
  auto row = [&](const WaveFunction& w) {
    const auto mo = moments(w, hbar, m, st);
    const double e = energy(sys, w);
    const double exact = omega > 0 ? analytic_ho_uncertainty(w.time, sigma, m, omega, hbar)
                                   : analytic_free_uncertainty(w.time, sigma, m, hbar);
    norm_dev = std::max(norm_dev, std::abs(mo.norm - n0));
    e_dev = std::max(e_dev, std::abs(e - e0) / std::max(std::abs(e0), 1e-300));
    tab.add_row({w.time, mo.norm, mo.mean_x, mo.mean_p, mo.var_x, mo.var_p, mo.uncertainty_product(), exact, e});
  };
  row(wf);
  const auto n = std::size_t(std::llround(T / dt));
  wf = evolve(wf, sys, n, [&](std::size_t, const WaveFunction& w) { row(w); }, cadence);
  if (n % cadence != 0) row(wf);

  res.tables.emplace_back("evolve", std::move(tab));
  add_check(res, "norm_drift", norm_dev <= 1e-8, show(norm_dev, 1e-8));
  add_check(res, "energy_drift", e_dev <= 1e-8, show(e_dev, 1e-8));
  const double edge = tail_mass(wf, 0.02);
  add_check(res, "edge_mass", edge <= 1e-8, show(edge, 1e-8));
  res.solver = {{"dx", fmt(dx)}, {"dt", fmt(dt)}, {"stencil", c.string("solver.stencil")},
                {"n_points", std::to_string(grid.n_points)}, {"steps", std::to_string(n)}};
}

void run_box(const ScenarioConfig& c, RunResult& res) {
  const double m = c.number("physics.mass"), hbar = c.number("physics.hbar");
  const double W = c.number("physics.width"), sigma = c.number("physics.sigma");
  const double x0 = c.has("physics.x0") ? c.number("physics.x0") : 0.5 * W;
  const double p0 = c.number("physics.p0"), T = c.number("physics.t_end");
  const double dx = c.number("solver.dx"), dt = c.number("solver.dt");
  const auto cadence = std::size_t(c.integer("solver.cadence"));
  const Stencil st = stencil_of(c.string("solver.stencil"));
  const auto cells = std::size_t(std::llround(W / dx));
  const Grid grid(0.0, W, cells + 1);
  WaveFunction wf = make_gaussian(grid, {x0, sigma, p0}, hbar);
  if (tail_mass(wf, 0.02) > 1e-10)
    throw ConfigError("physics.sigma", "initial packet overlaps the walls; reduce 'physics.sigma' or move 'physics.x0'");
  wf.psi.front() = wf.psi.back() = 0.0;
  const BandedSystem sys(grid, PotentialGrid::sample(grid, [](double) { return 0.0; }), m, dt, st, hbar);

  CsvTable tab({"t", "norm", "mean_x", "mean_p", "var_x", "energy"},
               {"time", "1", "length", "momentum", "length^2", "energy"});
  tab.meta("scenario", "box");
  tab.meta("walls", "0 and " + fmt(W));
  const double e0 = energy(sys, wf), n0 = norm(wf);
  double norm_dev = 0, e_dev = 0;
  auto row = [&](const WaveFunction& w) {
    const auto mo = moments(w, hbar, m, st);
    const double e = energy(sys, w);
    norm_dev = std::max(norm_dev, std::abs(mo.norm - n0));
    e_dev = std::max(e_dev, std::abs(e - e0) / std::max(std::abs(e0), 1e-300));
    tab.add_row({w.time, mo.norm, mo.mean_x, mo.mean_p, mo.var_x, e});
  };
  row(wf);
  const auto n = std::size_t(std::llround(T / dt));
  wf = evolve(wf, sys, n, [&](std::size_t, const WaveFunction& w) { row(w); }, cadence);
  if (n % cadence != 0) row(wf);
  res.tables.emplace_back("box", std::move(tab));
  add_check(res, "norm_drift", norm_dev <= 1e-8, show(norm_dev, 1e-8));
  add_check(res, "energy_drift", e_dev <= 1e-8, show(e_dev, 1e-8));
  res.solver = {{"dx", fmt(dx)}, {"dt", fmt(dt)}, {"stencil", c.string("solver.stencil")}};
}

// ---------------------------------------------------------------- scattering

CollisionConfig collision_of(const ScenarioConfig& c, double sigma) {
  CollisionConfig cc;
  cc.Z_P = c.number("physics.Z_P");
  cc.Z_T = c.number("physics.Z_T");
  cc.m = c.number("physics.mass");
  cc.L = c.number("physics.L");
  cc.T0 = c.number("physics.T0");
  cc.sigma = sigma;
  if (!(cc.L > cc.d_cl())) throw ConfigError("physics.L", "launch distance lies inside the turning point");
  return cc;
}

void run_rutherford(const ScenarioConfig& c, const RunOptions& o, RunResult& res) {
  const auto sigmas = c.numbers("physics.sigma");
  SolverOptions so;
  so.dx = c.number("solver.dx");
  so.dt = c.number("solver.dt");
  so.cadence = std::size_t(c.integer("solver.cadence"));
  so.stencil = stencil_of(c.string("solver.stencil"));
  so.regrid.safety = c.number("solver.regrid_safety");
  so.regrid.half_width_factor = c.number("solver.regrid_half_width");
  so.run_to_return = c.flag("physics.run_to_return");
  const bool colliding = c.string("physics.mode") == "colliding";
  const double tol = c.number("checks.energy_tol");

  struct Out {
    CollisionConfig cfg;
    CollisionReport rep;
    double width = 0;
  };
  const auto outs = parallel_map<Out>(sigmas.size(), o.threads, [&](std::size_t i) {
    const auto cc = collision_of(c, sigmas[i]);
    if (colliding) {
      auto cr = colliding_packets(cc, so);
      return Out{cr.relative, std::move(cr.report), cr.projectile_optimal_width};
    }
    auto rep = quantum_collision(cc, so);
    return Out{cc, std::move(rep), cc.sigma_optimal()};
  });

  CsvTable sum({"sigma", "d_cl", "d_qm", "bound_width", "tau_cl", "tau_qm", "tau_min_spread", "min_spread",
                "peak_energy_error", "return_asymmetry"},
               {"fm", "fm", "fm", "fm", "fm/c", "fm/c", "fm/c", "fm", "1", "fm/c"});
  sum.meta("scenario", "rutherford");
  sum.meta("mode", colliding ? "colliding (relative coordinate)" : "target");
  sum.meta("sigma_optimal", outs.front().width);
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const auto& r = outs[i].rep;
    sum.add_row({sigmas[i], r.d_cl, r.d_qm, r.bound_width, r.tau_cl, r.tau_qm, r.tau_min_spread, r.min_spread,
                 r.peak_energy_error, r.return_asymmetry});
    const std::string tag = "sigma=" + fmt(sigmas[i]);
    add_check(res, "bound[" + tag + "]", r.bound_ok,
              fmt(r.d_cl) + " < " + fmt(r.d_qm) + " < " + fmt(r.d_cl + r.bound_width));
    add_check(res, "energy[" + tag + "]", r.peak_energy_error <= tol, show(r.peak_energy_error, tol));

    CsvTable tr({"t", "mean_x", "spread_x", "mean_p", "energy", "x_cl", "p_cl"},
                {"fm/c", "fm", "fm", "MeV", "MeV", "fm", "MeV"});
    tr.meta("scenario", "rutherford trajectory");
    tr.meta("sigma", sigmas[i]);
    for (const auto& s : r.series) {
      const auto cl = classical_trajectory(outs[i].cfg, s.t);
      tr.add_row({s.t, s.mean_x, s.spread_x, s.mean_p, s.energy, cl.x, cl.p});
    }
    res.tables.emplace_back(outs.size() == 1 ? "trajectory" : "trajectory_" + std::to_string(i), std::move(tr));
  }
  res.tables.emplace(res.tables.begin(), "summary", std::move(sum));
  res.solver = {{"dx", fmt(so.dx)}, {"dt", fmt(so.dt)}, {"cadence", std::to_string(so.cadence)},
                {"stencil", c.string("solver.stencil")}, {"threads", std::to_string(o.threads)}};
}

void run_tunneling(const ScenarioConfig& c, const RunOptions& o, RunResult& res) {
  const auto sigmas = c.numbers("physics.sigma");
  const double smin = c.number("physics.sigma_min");
  for (double s : sigmas)
    if (s < smin)
      throw ConfigError("physics.sigma", "spread " + fmt(s) + " fm is below physics.sigma_min = " + fmt(smin) +
                                             " fm; the box grows roughly as 1/sigma and the run as 1/sigma^2");
  TunnelingOptions to;
  to.dx = c.number("solver.dx");
  to.dt = c.number("solver.dt");
  to.stencil = stencil_of(c.string("solver.stencil"));
  to.absorber_width = c.number("solver.absorber_width");
  to.well_margin = c.number("solver.well_margin");
  to.flux_tol = c.number("solver.flux_tol");
  to.flux_samples = std::size_t(c.integer("solver.flux_samples"));
  to.max_steps = std::size_t(c.integer("solver.max_steps"));
  to.barrier = c.flag("physics.barrier");
  const double l = c.number("physics.l");

  const auto reps = parallel_map<TunnelingReport>(sigmas.size(), o.threads, [&](std::size_t i) {
    auto cc = collision_of(c, sigmas[i]);
    cc.l = l;
    return dynamical_tunneling(cc, to);
  });
  CsvTable tab({"sigma", "P_T", "P_cl", "P_WKB", "absorbed", "reflected", "steps"},
               {"fm", "1", "1", "1", "1", "1", "1"});
  tab.meta("scenario", "tunneling");
  tab.meta("barrier", to.barrier ? "Coulomb for x <= -l, zero beyond" : "none");
  for (std::size_t i = 0; i < reps.size(); ++i) {
    auto cc = collision_of(c, sigmas[i]);
    cc.l = l;
    const double pcl = classical_crossing_probability(cc);
    double pwkb = 1.0;
    if (cc.d_cl() > cc.l) pwkb = wkb_tunneling(cc);
    const auto& r = reps[i];
    tab.add_row({sigmas[i], r.P_T, pcl, pwkb, r.absorbed, r.reflected, double(r.steps)});
    const double drift = std::abs(r.P_T + r.reflected - 1.0);
    add_check(res, "probability[sigma=" + fmt(sigmas[i]) + "]", drift <= 1e-6, show(drift, 1e-6));
  }
  res.tables.emplace_back("tunneling", std::move(tab));
  res.solver = {{"dx", fmt(to.dx)}, {"dt", fmt(to.dt)}, {"energy_shift", "E0"}, {"flux_tol", fmt(to.flux_tol)},
                {"threads", std::to_string(o.threads)}};
}

// ---------------------------------------------------------------- Gaussian closed forms

struct Spheres {
  double rho = 0, m = 0, R0 = 0, L = 0;
};

Spheres spheres_of(const ScenarioConfig& c) {
  Spheres s;
  const auto mat = c.string("physics.material");
  if (mat == "osmium")
    s.rho = Constants::density_osmium;
  else if (mat == "silica")
    s.rho = Constants::density_silica;
  else if (c.has("physics.density"))
    s.rho = c.number("physics.density");
  else
    throw ConfigError("physics.density", "missing required field 'physics.density' for material = custom");
  if (c.has("physics.mass")) {
    s.m = c.number("physics.mass");
    s.R0 = c.has("physics.R0") ? c.number("physics.R0") : sphere_radius(s.rho, s.m);
  } else {
    s.R0 = c.number("physics.R0");
    s.m = sphere_mass(s.rho, s.R0);
  }
  s.L = c.number("physics.L_over_R0") * s.R0;
  return s;
}

double jitter_free_E(double t, double w, double w0) { return freefall_negativity_exact(t, w, w0); }

void run_entangle_gaussian(const ScenarioConfig& c, RunResult& res) {
  const auto sp = spheres_of(c);
  const double hbar = Constants::hbar;
  double w0, sigma;
  if (c.has("physics.omega0")) {
    w0 = c.number("physics.omega0");
    sigma = std::sqrt(hbar / (2.0 * sp.m * w0));
  } else {
    sigma = c.number("physics.sigma");
    w0 = hbar / (2.0 * sp.m * sigma * sigma);
  }
  double w2;
  std::string source;
  if (c.has("physics.omega")) {
    w2 = std::pow(c.number("physics.omega"), 2);
    source = "supplied";
  } else {
    const auto it = c.string("physics.interaction");
    const double hc = hbar * Constants::speed_of_light;
    CentralPotentialSpec spec;
    if (it == "newtonian")
      spec = CentralPotentialSpec::newtonian(sp.m, sp.L);
    else if (it == "mond")
      spec = CentralPotentialSpec::mond(sp.m, sp.L);
    else if (it == "casimir")
      spec = CentralPotentialSpec::casimir(sp.R0, sp.m, sp.L, hc);
    else
      spec = CentralPotentialSpec::composite(
          {CentralPotentialSpec::newtonian(sp.m, sp.L), CentralPotentialSpec::casimir(sp.R0, sp.m, sp.L, hc)});
    const auto om = omega_squared(spec);
    if (!om.attractive) throw ConfigError("physics.interaction", "interaction is not attractive");
    w2 = om.value;
    source = it;
  }
  const double w = std::sqrt(w2);
  const bool trapped = c.flag("physics.trapped");
  const double temp = c.number("physics.temperature");
  const double nbar = thermal_occupation(temp, w0);
  const double T = c.number("physics.t_end");
  const auto n = std::size_t(c.integer("physics.samples"));

  std::vector<std::string> cols = {"t", "E_closed", "S_closed"}, units = {"s", "ebit", "bit"};
  if (temp > 0) {
    cols.push_back("E_thermal");
    units.push_back("ebit");
  }
  CsvTable tab(cols, units);
  tab.meta("scenario", "entangle-gaussian");
  tab.meta("mass_kg", sp.m);
  tab.meta("R0_m", sp.R0);
  tab.meta("L_m", sp.L);
  tab.meta("sigma_m", sigma);
  tab.meta("omega_rad_s", w);
  tab.meta("omega_source", source);
  tab.meta("omega0_rad_s", w0);
  tab.meta("evolution", trapped ? "trapped" : "free fall");
  if (temp > 0) tab.meta("nbar", nbar);

  double worst = 0;
  bool nonneg = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? T * double(i) / double(n - 1) : T;
    double E, S;
    if (trapped) {
      E = trapped_negativity_exact(t, w, w0);
      S = trapped_entropy_exact(t, w, w0);
    } else {
      E = jitter_free_E(t, w, w0);
      S = freefall_entropy_exact(t, w, w0);
    }
    // the covariance route is only well conditioned while omega0 t stays moderate
    if (w0 * t < 30.0) {
      const auto cov = trapped ? covariance_trapped(t, w, w0, sp.m, hbar) : covariance_freefall(t, w, w0, sp.m, hbar);
      worst = std::max(worst, std::abs(log_negativity(cov) - E));
    }
    nonneg = nonneg && E >= 0 && S >= 0;
    std::vector<double> row = {t, E, S};
    if (temp > 0) row.push_back(thermal_negativity(E, nbar));
    tab.add_row(row);
  }
  res.tables.emplace_back("entanglement", std::move(tab));
  add_check(res, "closed_form_vs_covariance", worst <= 1e-6, show(worst, 1e-6));
  add_check(res, "non_negative", nonneg);
  res.solver = {{"method", "closed form"}, {"samples", std::to_string(n)}};
}

void run_mond(const ScenarioConfig& c, RunResult& res) {
  const auto sp = spheres_of(c);
  const double w0 = c.number("physics.omega0"), temp = c.number("physics.temperature");
  const double T = c.number("physics.t_end"), thr = c.number("physics.threshold");
  const auto n = std::size_t(c.integer("physics.samples"));
  const double wN = std::sqrt(omega_squared(CentralPotentialSpec::newtonian(sp.m, sp.L)).value);
  const double wM = std::sqrt(omega_squared(CentralPotentialSpec::mond(sp.m, sp.L)).value);
  const double nbar = thermal_occupation(temp, w0);
  const auto regime = mond_regime_check(sp.rho, sp.R0, sp.L);

  CsvTable tab({"t", "E_newton", "E_mond", "E_newton_thermal", "E_mond_thermal", "mond_only"},
               {"s", "ebit", "ebit", "ebit", "ebit", "1"});
  tab.meta("scenario", "mond-compare");
  tab.meta("threshold", thr);
  tab.meta("mass_kg", sp.m);
  tab.meta("R0_m", sp.R0);
  tab.meta("L_m", sp.L);
  tab.meta("omega_newton", wN);
  tab.meta("omega_mond", wM);
  tab.meta("nbar", nbar);
  tab.meta("a_N", regime.a_N);
  tab.meta("deep_mond", regime.deep_mond ? "yes" : "no");
  try {
    const auto wit = mond_witness_params(sp.m, sp.L, w0, regime.a_N);
    tab.meta("trapped_T0_K", wit.T0);
    tab.meta("trapped_mond_residual", wit.residual);
  } catch (const Error&) {
    tab.meta("trapped_T0_K", "undefined");
  }
  double first = -1, last = -1;
  bool ordered = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? T * double(i) / double(n - 1) : T;
    const double eN = freefall_negativity_exact(t, wN, w0), eM = freefall_negativity_exact(t, wM, w0);
    const double tN = thermal_negativity(eN, nbar), tM = thermal_negativity(eM, nbar);
    const bool window = tN == 0.0 && tM > thr;
    if (window) {
      if (first < 0) first = t;
      last = t;
    }
    ordered = ordered && tN <= eN && tM <= eM;
    tab.add_row({t, eN, eM, tN, tM, window ? 1.0 : 0.0});
  }
  tab.meta("mond_only_window_s", first < 0 ? std::string("none") : fmt(first) + ".." + fmt(last));
  res.tables.emplace_back("mond", std::move(tab));
  add_check(res, "thermal_below_pure", ordered);
  res.solver = {{"method", "closed form"}, {"samples", std::to_string(n)}};
}

void run_casimir(const ScenarioConfig& c, RunResult& res) {
  const auto sp = spheres_of(c);
  const double w0 = c.number("physics.omega0"), T = c.number("physics.t_end");
  const auto n = std::size_t(c.integer("physics.samples"));
  const double hc = Constants::hbar * Constants::speed_of_light;
  const auto g = CentralPotentialSpec::newtonian(sp.m, sp.L);
  const auto k = CentralPotentialSpec::casimir(sp.R0, sp.m, sp.L, hc);
  const double wg2 = omega_squared(g).signed_value(), wc2 = omega_squared(k).signed_value();
  const double wb2 = omega_squared(CentralPotentialSpec::composite({g, k})).signed_value();
  CsvTable tab({"t", "E_gravity", "E_casimir", "E_combined"}, {"s", "ebit", "ebit", "ebit"});
  tab.meta("scenario", "casimir-compare");
  tab.meta("mass_kg", sp.m);
  tab.meta("R0_m", sp.R0);
  tab.meta("L_m", sp.L);
  tab.meta("omega2_gravity", wg2);
  tab.meta("omega2_casimir", wc2);
  tab.meta("omega2_combined", wb2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n > 1 ? T * double(i) / double(n - 1) : T;
    tab.add_row({t, freefall_negativity_exact(t, std::sqrt(wg2), w0), freefall_negativity_exact(t, std::sqrt(wc2), w0),
                 freefall_negativity_exact(t, std::sqrt(wb2), w0)});
  }
  res.tables.emplace_back("casimir", std::move(tab));
  const double add = std::abs(wb2 - (wg2 + wc2)) / std::abs(wb2);
  add_check(res, "omega2_additive", add <= 1e-12, show(add, 1e-12));
  res.solver = {{"method", "closed form"}, {"samples", std::to_string(n)}};
}

// ---------------------------------------------------------------- numeric entanglement

void run_entangle_numeric(const ScenarioConfig& c, const RunOptions& o, RunResult& res) {
  const double m = c.number("physics.mass"), hbar = c.number("physics.hbar");
  const double sigma = c.number("physics.sigma"), w = c.number("physics.omega"), L = c.number("physics.L");
  const auto p0s = c.numbers("physics.p0");
  const int order = int(c.integer("physics.order"));
  if (order < 2) throw ConfigError("physics.order", "field 'physics.order' must be at least 2");

  NumericEntanglementConfig base;
  base.spec = CentralPotentialSpec::newtonian(m, L, w * w * L * L * L / (4.0 * m));
  base.order = order;
  base.m = m;
  base.sigma = sigma;
  base.P_com = c.number("physics.P_com");
  base.run.t_end = c.number("physics.t_end");
  base.run.dt = c.number("solver.dt");
  base.run.dx = c.number("solver.dx");
  base.run.cadence = std::size_t(c.integer("solver.cadence"));
  base.run.stencil = stencil_of(c.string("solver.stencil"));
  base.run.half_width = c.has("solver.half_width") ? c.number("solver.half_width") : 0.0;
  base.run.hbar = hbar;
  base.schmidt = c.flag("solver.schmidt");
  base.schmidt_every = std::size_t(c.integer("solver.schmidt_every"));
  const double stol = c.number("solver.schmidt_tol");

  const auto series = parallel_map<EntanglementSeries>(p0s.size(), o.threads, [&](std::size_t i) {
    auto cfg = base;
    cfg.p0 = p0s[i];
    return numeric_entanglement(cfg);
  });

  const double w0 = hbar / (2.0 * m * sigma * sigma);
  CsvTable sum({"p0", "t_end", "E_end", "S_end", "E_closed_end", "S_closed_end"},
               {"momentum", "time", "ebit", "bit", "ebit", "bit"});
  sum.meta("scenario", "entangle-numeric");
  sum.meta("order", double(order));
  double det_dev = 0, norm_dev = 0, captured_min = 1;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& es = series[k];
    CsvTable tab({"t", "E", "S", "E_closed", "S_closed", "E_pred", "S_pred", "eps3", "skewness", "mean_r", "mean_p"},
                 {"time", "ebit", "bit", "ebit", "bit", "ebit", "bit", "1", "1", "length", "momentum"});
    tab.meta("scenario", "entangle-numeric");
    tab.meta("provenance", es.provenance);
    tab.meta("p0", p0s[k]);
    tab.meta("omega", w);
    tab.meta("omega0", w0);
    for (std::size_t i = 0; i < es.t.size(); ++i) {
      const double t = es.t[i];
      const double Ec = t > 0 ? freefall_negativity_exact(t, w, w0) : 0.0;
      const double Sc = t > 0 ? freefall_entropy_exact(t, w, w0) : 0.0;
      const double e3 = epsilon3(base.spec, p0s[k], m, t);
      tab.add_row({t, es.E[i], es.S[i], Ec, Sc, (1.0 + 0.5 * e3) * Ec, (1.0 + e3) * Sc, e3, es.skewness[i],
                   es.mean_r[i], es.mean_p[i]});
      norm_dev = std::max(norm_dev, std::abs(es.relative[i].norm - 1.0));
      if (order == 2)
        det_dev = std::max(det_dev, std::abs(es.covariance[i].det() / std::pow(0.5 * hbar, 4) - 1.0));
    }
    sum.add_row({p0s[k], es.t.back(), es.E.back(), es.S.back(), freefall_negativity_exact(es.t.back(), w, w0),
                 freefall_entropy_exact(es.t.back(), w, w0)});
    const std::string stem = series.size() == 1 ? "numeric" : "numeric_" + std::to_string(k);
    res.tables.emplace_back(stem, std::move(tab));
    if (base.schmidt) {
      CsvTable sch({"t", "S_schmidt", "S_cov", "captured", "rank"}, {"time", "bit", "bit", "1", "1"});
      sch.meta("scenario", "entangle-numeric schmidt");
      sch.meta("p0", p0s[k]);
      std::size_t j = 0;
      for (std::size_t i = 0; i < es.schmidt_t.size(); ++i) {
        while (j < es.t.size() && es.t[j] < es.schmidt_t[i]) ++j;
        sch.add_row({es.schmidt_t[i], es.S_schmidt[i], es.S[j], es.schmidt_captured[i], double(es.schmidt_rank[i])});
        captured_min = std::min(captured_min, es.schmidt_captured[i]);
      }
      res.tables.emplace_back(stem + "_schmidt", std::move(sch));
    }
  }
  res.tables.emplace(res.tables.begin(), "summary", std::move(sum));
  add_check(res, "norm", norm_dev <= 1e-8, show(norm_dev, 1e-8));
  if (order == 2) add_check(res, "pure_gaussian_det", det_dev <= 1e-6, show(det_dev, 1e-6));
  if (base.schmidt) add_check(res, "schmidt_weight", captured_min >= 1.0 - stol, show(1.0 - captured_min, stol));
  res.solver = {{"dx", fmt(base.run.dx)}, {"dt", fmt(base.run.dt)}, {"cadence", std::to_string(base.run.cadence)},
                {"stencil", c.string("solver.stencil")}, {"threads", std::to_string(o.threads)}};
}

// ---------------------------------------------------------------- convergence

double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  // least-squares slope of log(err) against log(h)
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

void run_convergence(const ScenarioConfig& c, const RunOptions& o, RunResult& res) {
  const auto dxs = c.numbers("solver.dx"), dts = c.numbers("solver.dt");
  const auto target = c.string("physics.target");
  const auto stsel = c.string("solver.stencil");
  std::vector<Stencil> sts;
  if (stsel != "penta") sts.push_back(Stencil::Tri);
  if (stsel != "tri") sts.push_back(Stencil::Penta);

  struct Job {
    double dx, dt;
    Stencil st;
  };
  std::vector<Job> jobs;
  for (auto st : sts)
    for (double dt : dts)
      for (double dx : dxs) jobs.push_back({dx, dt, st});

  if (target == "rutherford") {
    if (c.string("units") != "natural") throw ConfigError("units", "rutherford convergence runs in natural units");
    CollisionConfig cc = collision_of(c, c.number("physics.sigma"));
    struct Row {
      double d_qm, err, tau;
    };
    const auto rows = parallel_map<Row>(jobs.size(), o.threads, [&](std::size_t i) {
      SolverOptions so;
      so.dx = jobs[i].dx;
      so.dt = jobs[i].dt;
      so.stencil = jobs[i].st;
      so.cadence = std::size_t(c.integer("solver.cadence"));
      so.record_series = false;
      const auto r = quantum_collision(cc, so);
      return Row{r.d_qm, r.peak_energy_error, r.tau_qm};
    });
    CsvTable tab({"dx", "dt", "stencil", "d_qm", "peak_energy_error", "tau_qm"},
                 {"fm", "fm/c", "3 or 5 points", "fm", "1", "fm/c"});
    tab.meta("scenario", "convergence rutherford");
    tab.meta("d_cl", cc.d_cl());
    for (std::size_t i = 0; i < jobs.size(); ++i)
      tab.add_row({jobs[i].dx, jobs[i].dt, jobs[i].st == Stencil::Tri ? 3.0 : 5.0, rows[i].d_qm, rows[i].err,
                   rows[i].tau});
    res.tables.emplace_back("convergence", std::move(tab));
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.d_qm > cc.d_cl();
    add_check(res, "d_qm_above_d_cl", ok);
  } else {
    if (c.string("units") != "dimensionless") throw ConfigError("units", "evolve convergence runs dimensionless");
    if (!c.has("physics.t_end")) throw ConfigError("physics.t_end", "missing required field 'physics.t_end'");
    const double m = 1.0, hbar = c.number("physics.hbar"), sigma = c.number("physics.sigma");
    const double x0 = c.number("physics.x0"), p0 = c.number("physics.p0"), T = c.number("physics.t_end");
    const auto errs = parallel_map<double>(jobs.size(), o.threads, [&](std::size_t i) {
      const auto& j = jobs[i];
      const double sT = sigma * std::sqrt(1.0 + std::pow(hbar * T / (2 * m * sigma * sigma), 2));
      const double xe = x0 + p0 * T / m;
      const double lo = std::floor((std::min(x0, xe) - 12 * sT) / j.dx) * j.dx;
      const Grid g = Grid::with_spacing(lo, std::max(x0, xe) + 12 * sT, j.dx);
      const BandedSystem sys(g, PotentialGrid::sample(g, [](double) { return 0.0; }), m, j.dt, j.st, hbar);
      auto wf = evolve(make_gaussian(g, {x0, sigma, p0}, hbar), sys, std::size_t(std::llround(T / j.dt)));
      const auto mo = moments(wf, hbar, m, j.st);
      return std::abs(mo.uncertainty_product() - analytic_free_uncertainty(T, sigma, m, hbar));
    });
    CsvTable tab({"dx", "dt", "stencil", "uncertainty_error"}, {"length", "time", "3 or 5 points", "hbar"});
    tab.meta("scenario", "convergence evolve");
    for (std::size_t i = 0; i < jobs.size(); ++i)
      tab.add_row({jobs[i].dx, jobs[i].dt, jobs[i].st == Stencil::Tri ? 3.0 : 5.0, errs[i]});
    for (auto st : sts) {
      std::vector<double> h, e;
      for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].st == st && jobs[i].dt == dts.front()) {
          h.push_back(jobs[i].dx);
          e.push_back(errs[i]);
        }
      if (h.size() >= 2) tab.meta(st == Stencil::Tri ? "order_tri" : "order_penta", fitted_order(h, e));
    }
    res.tables.emplace_back("convergence", std::move(tab));
  }
  res.solver = {{"jobs", std::to_string(jobs.size())}, {"threads", std::to_string(o.threads)}};
}

}  // namespace

std::vector<std::string> scenario_kinds() {
  std::vector<std::string> out;
  for (const auto& s : schemas()) out.push_back(s.kind);
  return out;
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  if (cfg.tier() == "slow" && opts.tier != "slow")
    throw ConfigError("tier", "this config is marked tier = \"slow\"; rerun with --tier slow");
  RunResult r;
  const auto& k = cfg.kind();
  if (k == "evolve")
    run_evolve(cfg, r);
  else if (k == "box")
    run_box(cfg, r);
  else if (k == "rutherford")
    run_rutherford(cfg, opts, r);
  else if (k == "tunneling")
    run_tunneling(cfg, opts, r);
  else if (k == "entangle-gaussian")
    run_entangle_gaussian(cfg, r);
  else if (k == "entangle-numeric")
    run_entangle_numeric(cfg, opts, r);
  else if (k == "mond-compare")
    run_mond(cfg, r);
  else if (k == "casimir-compare")
    run_casimir(cfg, r);
  else
    run_convergence(cfg, opts, r);
  return r;
}

int execute(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  Manifest man;
  man.config_sha256 = cfg.sha256();
  man.version = kVersion;
  man.scenario = cfg.kind();
  man.tier = opts.tier;
  int code = Ok;
  RunResult res;
  try {
    res = run_scenario(cfg, opts);
  } catch (const ConfigError& e) {
    log << "config invalid: " << e.what() << '\n';
    return ConfigInvalid;
  } catch (const Error& e) {
    const bool invariant = e.code() == ErrorCode::NonPhysical || e.code() == ErrorCode::NotNormalized;
    log << (invariant ? "invariant violation: " : "numerical failure: ") << e.what() << '\n';
    code = invariant ? InvariantViolation : NumericalFailure;
    man.checks.push_back({error_name(e.code()), false, e.what()});
  }
  man.checks.insert(man.checks.end(), res.checks.begin(), res.checks.end());
  man.solver = res.solver;

  std::filesystem::create_directories(opts.out_dir);
  bool failed = false;
  for (const auto& c : res.checks) {
    if (!c.pass) {
      log << "invariant violation: " << c.name << (c.detail.empty() ? "" : " = " + c.detail) << '\n';
      failed = true;
    }
  }
  if (code == Ok && failed) code = InvariantViolation;
  if (code == Ok) {
    for (const auto& [stem, tab] : res.tables) {
      const auto file = stem + ".csv";
      tab.write(opts.out_dir / file);
      man.files.push_back(file);
    }
  }
  man.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(man, opts.out_dir / "manifest.json");
  if (code == Ok) log << "wrote " << man.files.size() << " table(s) to " << opts.out_dir.string() << '\n';
  return code;
}

}  // namespace cvq::cli
