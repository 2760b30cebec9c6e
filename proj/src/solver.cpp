#include "cbsq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "cbsq/errors.hpp"
#include "cbsq/kernels.hpp"
#include "cbsq/spectral_ops.hpp"
#include "cbsq/transform.hpp"
#include "tabulate.hpp"

namespace cbsq {

namespace {

struct VelocityGrid {
  std::vector<double> u, v;
  double speed = 0.0;
};

VelocityGrid velocity_grid(const SpectralField& omega, double t, const GridTransform& tr) {
  SpectralField w = omega;
  apply_dealias_mask(w);
  w(0, 0) = cplx{0.0, 0.0};
  const Velocity vel = biot_savart(w, t);
  const auto n = omega.lattice().size();
  VelocityGrid g{std::vector<double>(n), std::vector<double>(n), 0.0};
  tr.to_grid(vel.u.coeffs(), g.u);
  tr.to_grid(vel.v.coeffs(), g.v);
  g.speed = kernels::max_speed(g.u, g.v, t);
  return g;
}

// Dealiased u.grad f in the sheared frame: d_x <-> i k, d_y <-> i (eta - k t).
SpectralField transport_with(const VelocityGrid& vg, const SpectralField& f, double t,
                             const GridTransform& tr) {
  const auto& lat = f.lattice();
  SpectralField out(lat, f.time(), f.frame());
  if (f.is_zero()) return out;
  SpectralField fz(lat, f.time(), f.frame()), fy(lat, f.time(), f.frame());
  const double shift = f.frame() == Frame::sheared ? t : 0.0;
  for (int k = -lat.kmax; k <= lat.kmax; ++k)
    for (int j = -lat.jmax; j <= lat.jmax; ++j) {
      if (!lat.in_band(k, j)) continue;
      const cplx c = f(k, j);
      fz(k, j) = cplx{0.0, double(k)} * c;
      fy(k, j) = cplx{0.0, lat.eta(j) - k * shift} * c;
    }
  const auto n = lat.size();
  std::vector<double> gz(n), gy(n), prod(n);
  tr.to_grid(fz.coeffs(), gz);
  tr.to_grid(fy.coeffs(), gy);
  kernels::transport(vg.u, vg.v, gz, gy, prod);
  tr.from_grid(prod, out.coeffs());
  apply_dealias_mask(out);
  return out;
}

void zero_mean(SpectralField& f) { f(0, 0) = cplx{0.0, 0.0}; }

struct StepFactors {
  std::vector<double> half, tail, full;  // E(tm,t0), E(t1,tm), E(t1,t0)
};

StepFactors factors(const FrequencyLattice& lat, double coef, int sigma, double t0, double tm,
                    double t1) {
  auto make = [&](double a, double b) {
    return detail::tabulate(lat, [&](int k, int j) {
      return std::exp(-coef * phase_increment(k, lat.eta(j), a, b, sigma));
    });
  };
  return {make(t0, tm), make(tm, t1), make(t0, t1)};
}

SimState with_fields(const SimState& base, SpectralField omega, SpectralField theta, double t) {
  SimState s{std::move(omega), std::move(theta), base.params, t, base.step_count};
  s.omega.set_time(t);
  s.theta.set_time(t);
  return s;
}

std::string where(const SimState& s) {
  std::ostringstream os;
  os << "last good state t = " << s.t << ", step " << s.step_count;
  return os.str();
}

}  // namespace

double t_max(const FrequencyLattice& lattice) { return 2.0 * lattice.eta_max(); }

SpectralField transport_term(const SpectralField& omega, const SpectralField& f) {
  require_compatible(omega, f, "transport_term");
  const GridTransform tr(omega.lattice());
  const auto vg = velocity_grid(omega, omega.time(), tr);
  return transport_with(vg, f, omega.time(), tr);
}

Rhs nonlinear_rhs(const SimState& state, const StepperConfig& cfg) {
  require_compatible(state.omega, state.theta, "nonlinear_rhs");
  const auto& lat = state.omega.lattice();
  Rhs r{SpectralField(lat, state.t), SpectralField(lat, state.t), 0.0};
  if (cfg.nonlinear) {
    const GridTransform tr(lat);
    const auto vg = velocity_grid(state.omega, state.t, tr);
    r.max_speed = vg.speed;
    r.domega -= transport_with(vg, state.omega, state.t, tr);
    r.dtheta -= transport_with(vg, state.theta, state.t, tr);
  }
  if (cfg.buoyancy) {
    for (int k = -lat.kmax; k <= lat.kmax; ++k) {
      if (k == 0) continue;
      for (int j = -lat.jmax; j <= lat.jmax; ++j) r.domega(k, j) += cplx{0.0, double(k)} * state.theta(k, j);
    }
  }
  zero_mean(r.domega);
  zero_mean(r.dtheta);
  return r;
}

double confinement_fraction(const SpectralField& f) {
  const auto& lat = f.lattice();
  const int bj = lat.band_j();
  const double inner = 0.9 * bj;
  double outer = 0.0, total = 0.0;
  for (int k = -lat.kmax; k <= lat.kmax; ++k)
    for (int j = -lat.jmax; j <= lat.jmax; ++j) {
      const double e = std::norm(f(k, j));
      total += e;
      const int aj = std::abs(j);
      if (aj > inner && aj <= bj) outer += e;
    }
  return total > 0.0 ? outer / total : 0.0;
}

SimState step(const SimState& state, const StepperConfig& cfg, double dt_cap) {
  if (!(cfg.dt_max > 0.0)) throw Error(ErrorKind::config, "step: dt_max must be positive");
  if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
    throw Error(ErrorKind::config, "step: cfl_safety must lie in (0, 1]");
  if (!(dt_cap > 0.0)) throw Error(ErrorKind::usage, "step: dt_cap must be positive");
  const auto& lat = state.omega.lattice();
  const auto& p = state.params;
  const double t0 = state.t;

  const Rhs r1 = nonlinear_rhs(state, cfg);
  double dt = std::min(cfg.dt_max, dt_cap);
  if (r1.max_speed > 0.0) dt = std::min(dt, cfg.cfl_safety * std::min(lat.dz(), lat.dy()) / r1.max_speed);
  const double t1 = t0 + dt;
  const double tm = t0 + 0.5 * dt;

  const StepFactors en = factors(lat, p.nu, p.sigma, t0, tm, t1);
  const StepFactors em = factors(lat, p.mu, p.sigma, t0, tm, t1);
  const std::size_t n = lat.size();

  // Applies out = a*(x + s*y) per component with the omega/theta factor arrays.
  auto combine = [&](const std::vector<double>& ew, const std::vector<double>& et,
                     std::span<const cplx> xw, std::span<const cplx> yw, std::span<const cplx> xt,
                     std::span<const cplx> yt, double s, SpectralField& ow, SpectralField& ot) {
    auto cw = ow.coeffs();
    auto ct = ot.coeffs();
    for (std::size_t i = 0; i < n; ++i) {
      cw[i] = ew[i] * (xw[i] + s * yw[i]);
      ct[i] = et[i] * (xt[i] + s * yt[i]);
    }
  };

  SpectralField w1(lat, t1), th1(lat, t1);
  if (cfg.scheme == Scheme::midpoint) {
    SpectralField wa(lat, tm), ta(lat, tm);
    combine(en.half, em.half, state.omega.coeffs(), r1.domega.coeffs(), state.theta.coeffs(),
            r1.dtheta.coeffs(), 0.5 * dt, wa, ta);
    const Rhs r2 = nonlinear_rhs(with_fields(state, std::move(wa), std::move(ta), tm), cfg);
    auto cw = w1.coeffs();
    auto ct = th1.coeffs();
    for (std::size_t i = 0; i < n; ++i) {
      cw[i] = en.full[i] * state.omega.coeffs()[i] + dt * en.tail[i] * r2.domega.coeffs()[i];
      ct[i] = em.full[i] * state.theta.coeffs()[i] + dt * em.tail[i] * r2.dtheta.coeffs()[i];
    }
  } else {
    SpectralField wa(lat, tm), ta(lat, tm);
    combine(en.half, em.half, state.omega.coeffs(), r1.domega.coeffs(), state.theta.coeffs(),
            r1.dtheta.coeffs(), 0.5 * dt, wa, ta);
    const Rhs r2 = nonlinear_rhs(with_fields(state, std::move(wa), std::move(ta), tm), cfg);

    SpectralField wb(lat, tm), tb(lat, tm);
    {
      auto cw = wb.coeffs();
      auto ct = tb.coeffs();
      for (std::size_t i = 0; i < n; ++i) {
        cw[i] = en.half[i] * state.omega.coeffs()[i] + 0.5 * dt * r2.domega.coeffs()[i];
        ct[i] = em.half[i] * state.theta.coeffs()[i] + 0.5 * dt * r2.dtheta.coeffs()[i];
      }
    }
    const Rhs r3 = nonlinear_rhs(with_fields(state, std::move(wb), std::move(tb), tm), cfg);

    SpectralField wc(lat, t1), tc(lat, t1);
    {
      auto cw = wc.coeffs();
      auto ct = tc.coeffs();
      for (std::size_t i = 0; i < n; ++i) {
        cw[i] = en.full[i] * state.omega.coeffs()[i] + dt * en.tail[i] * r3.domega.coeffs()[i];
        ct[i] = em.full[i] * state.theta.coeffs()[i] + dt * em.tail[i] * r3.dtheta.coeffs()[i];
      }
    }
    const Rhs r4 = nonlinear_rhs(with_fields(state, std::move(wc), std::move(tc), t1), cfg);

    auto cw = w1.coeffs();
    auto ct = th1.coeffs();
    const double d6 = dt / 6.0, d3 = dt / 3.0;
    for (std::size_t i = 0; i < n; ++i) {
      cw[i] = en.full[i] * (state.omega.coeffs()[i] + d6 * r1.domega.coeffs()[i]) +
              d3 * en.tail[i] * (r2.domega.coeffs()[i] + r3.domega.coeffs()[i]) + d6 * r4.domega.coeffs()[i];
      ct[i] = em.full[i] * (state.theta.coeffs()[i] + d6 * r1.dtheta.coeffs()[i]) +
              d3 * em.tail[i] * (r2.dtheta.coeffs()[i] + r3.dtheta.coeffs()[i]) + d6 * r4.dtheta.coeffs()[i];
    }
  }

  w1.enforce_reality();
  th1.enforce_reality();
  zero_mean(w1);
  zero_mean(th1);
  if (!w1.all_finite() || !th1.all_finite())
    throw Error(ErrorKind::nan_abort, "non-finite coefficients at t = " + format_double(t1) + "; " + where(state));
  const double cf = std::max(confinement_fraction(w1), confinement_fraction(th1));
  if (cf > cfg.confinement_threshold)
    throw Error(ErrorKind::confinement, "outer-band energy fraction " + format_double(cf) + " exceeds " +
                                            format_double(cfg.confinement_threshold) + " at t = " +
                                            format_double(t1) + "; " + where(state));
  SimState out{std::move(w1), std::move(th1), p, t1, state.step_count + 1};
  return out;
}

SimulationResult simulate(const SimState& initial, const StepperConfig& cfg, double t_end,
                          double report_every, const SimulateOptions& options) {
  if (!(report_every > 0.0)) throw Error(ErrorKind::config, "simulate: report_every must be positive");
  if (!(t_end >= initial.t)) throw Error(ErrorKind::config, "simulate: t_end precedes the initial time");
  require_compatible(initial.omega, initial.theta, "simulate");

  SimulationResult res;
  SimState state = initial;
  zero_mean(state.omega);
  zero_mean(state.theta);

  auto make_report = [&](const SimState& s) {
    EnergyReport r = energy_report(s.omega, s.theta, s.params);
    r.t = s.t;
    if (!res.reports.empty()) accumulate_time_integrals(res.reports.back(), r);
    res.reports.push_back(r);
    if (options.on_report) options.on_report(s, res.reports.back());
  };

  // Event times are integer multiples of the cadence counted from t = 0.
  auto next_multiple = [](double t, double every) {
    double n = std::floor(t / every);
    while (n * every <= t) n += 1.0;
    return n * every;
  };

  make_report(state);
  const bool ckpt = options.checkpoint_every > 0.0;
  double next_report = next_multiple(state.t, report_every);
  double next_ckpt = ckpt ? next_multiple(state.t, options.checkpoint_every) : INFINITY;

  while (state.t < t_end) {
    const double target = std::min({t_end, next_report, next_ckpt});
    state = step(state, cfg, target - state.t);
    if (target - state.t <= 1e-12 * std::max(1.0, std::abs(target))) {
      state.t = target;
      state.omega.set_time(target);
      state.theta.set_time(target);
    }
    const bool at_report = state.t == next_report || state.t == t_end;
    if (state.t == next_report) next_report = next_multiple(state.t, report_every);
    if (at_report) make_report(state);
    if (ckpt && state.t == next_ckpt) {
      next_ckpt = next_multiple(state.t, options.checkpoint_every);
      if (options.on_checkpoint) options.on_checkpoint(state);
    }
  }
  res.final_state = std::move(state);
  return res;
}

}  // namespace cbsq
