#include "cvqdyn/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace cvq {

double CollisionConfig::p0() const { return std::sqrt(2.0 * m * T0); }
double CollisionConfig::E0() const { return T0 + coupling() / L; }
double CollisionConfig::d_cl() const { return coupling() / E0(); }
double CollisionConfig::velocity() const { return std::sqrt(2.0 * E0() / m); }
double CollisionConfig::tau_cl() const { return classical_action_length(L, d_cl()) / velocity(); }
double CollisionConfig::sigma_optimal() const { return std::sqrt(hbar_c * L / (2.0 * p0())); }

void CollisionConfig::validate() const {
  if (!(m > 0 && L > 0 && T0 > 0 && sigma > 0 && l > 0 && hbar_c > 0))
    throw Error(ErrorCode::InvalidArgument, "collision parameters must be positive");
  if (!(L > d_cl())) {
    std::ostringstream os;
    os << "launch distance " << L << " does not exceed the closest approach " << d_cl();
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

double classical_action_length(double u, double d) {
  if (u < d) throw Error(ErrorCode::DomainError, "distance below the turning point");
  if (d == 0) return u;
  const double w = std::sqrt(1.0 - d / u);
  // (1+w)/(1-w) = (1+w)^2 u / d avoids the cancellation in 1 - w
  return u * w + 0.5 * d * std::log((1.0 + w) * (1.0 + w) * u / d);
}

ClassicalState classical_trajectory(const CollisionConfig& cfg, double t) {
  if (t < 0) throw Error(ErrorCode::InvalidArgument, "time must be non-negative");
  const double d = cfg.d_cl(), v = cfg.velocity(), tau = cfg.tau_cl();
  const double target = v * std::abs(t - tau);
  double u = d;
  if (target > 0) {
    double hi = std::max(cfg.L, 2.0 * d);
    int grow = 0;
    while (classical_action_length(hi, d) < target) {
      hi *= 2.0;
      if (++grow > 200) throw Error(ErrorCode::RootBracketFailure, "could not bracket the trajectory root");
    }
    auto f = [&](double x) { return classical_action_length(x, d) - target; };
    boost::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(f, d, hi, -target, f(hi),
                                                     boost::math::tools::eps_tolerance<double>(50), it);
    if (it >= 200) throw Error(ErrorCode::RootBracketFailure, "trajectory root did not converge");
    u = 0.5 * (r.first + r.second);
  }
  ClassicalState s;
  s.x = -u;
  const double w = std::sqrt(std::max(0.0, 1.0 - d / u));
  s.p = (t <= tau ? 1.0 : -1.0) * cfg.m * v * w;
  if (t == tau) s.p = 0.0;
  s.F = -cfg.coupling() / (u * u);
  return s;
}

double jensen_force_ratio(const CollisionConfig& cfg) {
  const double s = cfg.sigma, L = cfg.L;
  auto rho = [&](double x) {
    const double u = (x + L) / s;
    return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * s);
  };
  auto f = [&](double x) { return rho(x) / (x * x); };
  const double lo = -L - 12.0 * s, hi = std::min(-L + 12.0 * s, -0.5 * L);
  const double q = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-15);
  return q * L * L;
}

namespace {

struct Observed {
  double norm = 0, mean_x = 0, var_x = 0, mean_p = 0, p2 = 0, mean_v = 0;
};

Observed observe(const WaveFunction& wf, const std::vector<double>& v, double hbar, Stencil st) {
  Observed o;
  const double h = wf.grid.dx();
  const auto d = derivative(wf.psi, h, st);
  double n = 0, mx = 0, mx2 = 0, mp = 0, p2 = 0, mv = 0;
  for (std::size_t i = 0; i < wf.size(); ++i) {
    const double r = std::norm(wf.psi[i]);
    const double x = wf.grid.x(i);
    n += r;
    mx += r * x;
    mx2 += r * x * x;
    mp += (std::conj(wf.psi[i]) * d[i]).imag();
    p2 += std::norm(d[i]);
    mv += r * v[i];
  }
  o.norm = n * h;
  o.mean_x = mx / n;
  o.var_x = std::max(0.0, mx2 / n - o.mean_x * o.mean_x);
  o.mean_p = hbar * mp / n;
  o.p2 = hbar * hbar * p2 / n;
  o.mean_v = mv / n;
  return o;
}

Grid lattice_box(double centre, double half, double dx) {
  const double lo = std::floor((centre - half) / dx) * dx;
  const double hi = std::ceil((centre + half) / dx) * dx;
  return Grid(lo, hi, std::size_t(std::llround((hi - lo) / dx)) + 1);
}

// parabola vertex through three equally spaced samples
std::pair<double, double> vertex(double t0, double h, double y0, double y1, double y2) {
  const double den = y0 - 2.0 * y1 + y2;
  if (std::abs(den) < 1e-300) return {t0 + h, y1};
  const double s = 0.5 * (y0 - y2) / den;
  return {t0 + h * (1.0 + s), y1 - 0.25 * (y0 - y2) * s};
}

}  // namespace

CollisionReport quantum_collision(const CollisionConfig& cfg, const SolverOptions& opts) {
  cfg.validate();
  const double hbar = cfg.hbar_c, k = cfg.coupling(), dx = opts.dx;
  auto vfun = [&](double x) { return k / std::max(std::abs(x), 0.5 * dx); };

  CollisionReport rep;
  rep.d_cl = cfg.d_cl();
  rep.tau_cl = cfg.tau_cl();
  rep.sigma0_optimal = cfg.sigma_optimal();
  rep.bound_width = rep.sigma0_optimal;

  const GaussianState g{-cfg.L, cfg.sigma, cfg.p0()};
  const double hw = std::max(opts.regrid.safety, opts.regrid.half_width_factor) * cfg.sigma;
  WaveFunction wf = make_gaussian(lattice_box(-cfg.L, hw, dx), g, hbar);

  auto build = [&](const Grid& grid) {
    return BandedSystem(grid, PotentialGrid::sample(grid, vfun), cfg.m, opts.dt, opts.stencil, hbar);
  };
  auto sys = std::make_unique<BandedSystem>(build(wf.grid));

  const double e_start = energy(*sys, wf);
  auto o0 = observe(wf, sys->potential(), hbar, opts.stencil);
  const double ek_start = o0.p2 / (2.0 * cfg.m) + o0.mean_v;

  std::vector<TrajectorySample> window;  // last three samples
  double best_x = 1e300, best_s = 1e300;
  bool have_tau = false, have_spread = false, done = false;
  std::size_t rising = 0;
  const std::size_t cadence = std::max<std::size_t>(1, opts.cadence);
  const double h_obs = double(cadence) * opts.dt;
  double prev_t = 0, prev_p = o0.mean_p, prev_x = o0.mean_x;

  auto record = [&](const TrajectorySample& s) {
    if (opts.record_series) rep.series.push_back(s);
  };
  record({0.0, o0.mean_x, std::sqrt(o0.var_x), o0.mean_p, e_start});

  for (std::size_t step = 1; step <= opts.max_steps && !done; ++step) {
    sys->step_inplace(wf.psi);
    wf.time = double(step) * opts.dt;
    if (step % cadence != 0) continue;

    const auto o = observe(wf, sys->potential(), hbar, opts.stencil);
    const double e = energy(*sys, wf);
    rep.peak_energy_error = std::max(rep.peak_energy_error, std::abs(1.0 - e / e_start));
    const double ek = o.p2 / (2.0 * cfg.m) + o.mean_v;
    rep.peak_energy_error_kinetic = std::max(rep.peak_energy_error_kinetic, std::abs(1.0 - ek / ek_start));
    TrajectorySample s{wf.time, o.mean_x, std::sqrt(o.var_x), o.mean_p, e};
    record(s);

    window.push_back(s);
    if (window.size() > 3) window.erase(window.begin());
    if (window.size() == 3) {
      const auto& a = window[0];
      const auto& b = window[1];
      const auto& c = window[2];
      if (std::abs(b.mean_x) <= std::abs(a.mean_x) && std::abs(b.mean_x) < std::abs(c.mean_x) &&
          std::abs(b.mean_x) < best_x) {
        const auto v = vertex(a.t, h_obs, std::abs(a.mean_x), std::abs(b.mean_x), std::abs(c.mean_x));
        best_x = std::abs(b.mean_x);
        rep.d_qm = v.second;
      }
      if (b.spread_x <= a.spread_x && b.spread_x < c.spread_x && b.spread_x < best_s) {
        const auto v = vertex(a.t, h_obs, a.spread_x, b.spread_x, c.spread_x);
        best_s = b.spread_x;
        rep.tau_min_spread = v.first;
        rep.min_spread = v.second;
        have_spread = true;
      }
    }
    if (!have_tau && prev_p > 0 && o.mean_p <= 0) {
      rep.tau_qm = prev_t + (wf.time - prev_t) * prev_p / (prev_p - o.mean_p);
      have_tau = true;
    }
    if (have_tau && have_spread && s.spread_x > rep.min_spread) ++rising;

    if (opts.run_to_return) {
      if (have_tau && o.mean_x <= -cfg.L && prev_x > -cfg.L) {
        rep.return_time = prev_t + (wf.time - prev_t) * (prev_x + cfg.L) / (prev_x - o.mean_x);
        rep.return_asymmetry = (rep.return_time - rep.tau_qm) - rep.tau_qm;
        done = true;
      }
    } else if (have_tau && have_spread && rising > 5 && wf.time > rep.tau_qm + 0.05 * rep.tau_cl) {
      done = true;
    }
    prev_t = wf.time;
    prev_p = o.mean_p;
    prev_x = o.mean_x;

    if (!done && needs_regrid(wf, opts.regrid)) {
      auto rg = regrid(wf, opts.regrid);
      if (rg.moved) {
        wf = std::move(rg.wf);
        sys = std::make_unique<BandedSystem>(build(wf.grid));
        ++rep.regrids;
      }
    }
  }
  if (!done) throw Error(ErrorCode::NotConverged, "collision did not complete within the step budget");
  rep.bound_ok = rep.d_qm > rep.d_cl && rep.d_qm < rep.d_cl + rep.bound_width;
  return rep;
}

CollidingReport colliding_packets(const CollisionConfig& cfg, const SolverOptions& opts) {
  CollidingReport out;
  // A at -L with +p0, B at +L with -p0: centre of mass at rest
  out.com_momentum = cfg.p0() - cfg.p0();
  CollisionConfig rel = cfg;
  rel.m = 0.5 * cfg.m;
  rel.L = 2.0 * cfg.L;
  rel.T0 = 2.0 * cfg.T0;  // p0^2 / (2 mu) with the same p0
  rel.sigma = std::sqrt(2.0) * cfg.sigma;
  out.relative = rel;
  out.report = quantum_collision(rel, opts);
  out.projectile_optimal_width = std::sqrt(cfg.hbar_c * cfg.L / (2.0 * cfg.p0()));
  out.relative_optimal_width = std::sqrt(cfg.hbar_c * cfg.L / cfg.p0());
  out.report.bound_width = out.relative_optimal_width;
  out.report.bound_ok = out.report.d_qm > out.report.d_cl && out.report.d_qm < out.report.d_cl + out.report.bound_width;
  return out;
}

double classical_crossing_limit(const CollisionConfig& cfg) {
  if (!(cfg.l < cfg.L)) throw Error(ErrorCode::InvalidArgument, "barrier cut must lie inside the launch distance");
  return std::sqrt(2.0 * cfg.m * cfg.E0() * (1.0 / cfg.l - 1.0 / cfg.L) * cfg.d_cl());
}

double classical_crossing_probability(const CollisionConfig& cfg) {
  const double plim = classical_crossing_limit(cfg);
  const double dp = plim - cfg.p0();
  const double sgn = dp > 0 ? 1.0 : (dp < 0 ? -1.0 : 0.0);
  return 0.5 * (1.0 - sgn * std::erf(std::sqrt(2.0) * cfg.sigma * std::abs(dp) / cfg.hbar_c));
}

double wkb_action_integral(const CollisionConfig& cfg) {
  const double d = cfg.d_cl();
  if (!(d > cfg.l)) {
    std::ostringstream os;
    os << "E0 = " << cfg.E0() << " is not below the barrier top V(l) = " << cfg.coupling() / cfg.l;
    throw Error(ErrorCode::AboveBarrier, os.str());
  }
  const double c = std::sqrt(2.0 * cfg.m * cfg.E0());
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [&](double x) { return std::sqrt(std::max(0.0, d / x - 1.0)); };
  return c * ts.integrate(f, cfg.l, d);
}

double wkb_tunneling(const CollisionConfig& cfg) {
  const double S = wkb_action_integral(cfg);
  const double pre = cfg.hbar_c / std::sqrt(2.0 * cfg.m * cfg.E0() * (cfg.d_cl() / cfg.l - 1.0));
  return pre * std::exp(-2.0 * S / cfg.hbar_c);
}

TunnelingReport dynamical_tunneling(const CollisionConfig& cfg, const TunnelingOptions& opts) {
  cfg.validate();
  const double hbar = cfg.hbar_c, k = cfg.coupling(), dx = opts.dx;
  const double xw = -cfg.l;
  const double xa = xw + opts.well_margin;
  const double xr = std::round((xa + opts.absorber_width) / dx) * dx;
  const double shift = opts.barrier ? cfg.E0() : cfg.T0;
  auto vfun = [&](double x) { return (opts.barrier && x <= xw ? k / std::abs(x) : 0.0) - shift; };

  const GaussianState g{-cfg.L, cfg.sigma, cfg.p0()};
  const double hw = std::max(opts.regrid.safety, opts.regrid.half_width_factor) * cfg.sigma;
  Grid g0 = lattice_box(-cfg.L, hw, dx);
  if (g0.x_max > xr) throw Error(ErrorCode::InvalidArgument, "launch window overlaps the absorber");
  WaveFunction wf = make_gaussian(g0, g, hbar);

  auto build = [&](const Grid& grid) {
    return BandedSystem(grid, PotentialGrid::sample(grid, vfun), cfg.m, opts.dt, opts.stencil, hbar);
  };
  auto sys = std::make_unique<BandedSystem>(build(wf.grid));
  std::vector<double> mask;
  auto make_mask = [&]() {
    mask.assign(wf.size(), 1.0);
    for (std::size_t i = 0; i < wf.size(); ++i) {
      const double x = wf.grid.x(i);
      if (x > xa) mask[i] = std::pow(std::cos(0.5 * std::numbers::pi * std::min(1.0, (x - xa) / (xr - xa))), 0.125);
    }
  };
  make_mask();

  const RegridPolicy& pol = opts.regrid;
  TunnelingReport rep;
  bool armed = false;
  std::size_t quiet = 0;
  double prev_in = 0;

  // Large energy-shifted steps keep the eigen-populations exact but slow down
  // components far from E0, so the packet grows a trailing tail. The box is
  // therefore only extended or cropped on the lattice, never recentred.
  auto edge_mass = [&](double frac, bool left) {
    const std::size_t n = wf.size();
    const auto kk = std::min(n, std::max<std::size_t>(1, std::size_t(frac * double(n))));
    double s = 0;
    for (std::size_t i = 0; i < kk; ++i) s += std::norm(wf.psi[left ? i : n - 1 - i]);
    return s * dx;
  };
  auto inside = [&]() {
    double s = 0;
    for (std::size_t i = 0; i < wf.size(); ++i)
      if (wf.grid.x(i) > xw) s += std::norm(wf.psi[i]);
    return s * dx;
  };
  auto reshape = [&](std::ptrdiff_t add_left, std::ptrdiff_t add_right) {
    const auto n = std::ptrdiff_t(wf.size());
    const std::ptrdiff_t m = n + add_left + add_right;
    std::vector<cplx> psi(std::size_t(m), cplx{});
    for (std::ptrdiff_t i = 0; i < m; ++i) {
      const std::ptrdiff_t j = i - add_left;
      if (j >= 0 && j < n) psi[std::size_t(i)] = wf.psi[std::size_t(j)];
    }
    wf.grid = Grid(wf.grid.x_min - double(add_left) * dx, wf.grid.x_max + double(add_right) * dx, std::size_t(m));
    wf.psi = std::move(psi);
    sys = std::make_unique<BandedSystem>(build(wf.grid));
    make_mask();
  };

  for (std::size_t step = 1; step <= opts.max_steps; ++step) {
    sys->step_inplace(wf.psi);
    if (wf.grid.x_max > xa) {
      double lost = 0;
      for (std::size_t i = 0; i < wf.size(); ++i) {
        if (mask[i] < 1.0) {
          const double before = std::norm(wf.psi[i]);
          wf.psi[i] *= mask[i];
          lost += before - std::norm(wf.psi[i]);
        }
      }
      rep.absorbed += lost * dx;
    }
    rep.steps = step;

    if (step % 10 == 0 && !armed) {
      const auto o = observe(wf, sys->potential(), hbar, opts.stencil);
      const double left = o.norm - inside();
      armed = o.mean_p < 0 || left < 1e-6;
    }
    const double p_in = inside() + rep.absorbed;
    if (armed) {
      quiet = std::abs(p_in - prev_in) < opts.flux_tol ? quiet + 1 : 0;
      if (quiet >= opts.flux_samples) {
        rep.P_T = p_in;
        rep.reflected = norm(wf) - inside();
        return rep;
      }
    }
    prev_in = p_in;

    const double span = wf.grid.x_max - wf.grid.x_min;
    const auto chunk = std::ptrdiff_t(std::ceil(0.25 * span / dx));
    std::ptrdiff_t add_l = 0, add_r = 0;
    if (edge_mass(pol.trigger_fraction, true) > pol.trigger_mass) add_l = chunk;
    if (wf.grid.x_max < xr - 0.5 * dx && edge_mass(pol.trigger_fraction, false) > pol.trigger_mass)
      add_r = std::min(chunk, std::ptrdiff_t(std::llround((xr - wf.grid.x_max) / dx)));
    if (add_l == 0 && step % 10 == 0 && edge_mass(0.25, true) < 1e-14 && wf.size() > 400)
      add_l = -std::ptrdiff_t(std::floor(0.2 * double(wf.size())));
    if (add_l != 0 || add_r != 0) reshape(add_l, add_r);
  }
  throw Error(ErrorCode::NotConverged, "flux through the barrier did not settle within the step budget");
}

}  // namespace cvq
