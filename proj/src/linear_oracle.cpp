#include "cbsq/linear_oracle.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "cbsq/errors.hpp"
#include "cbsq/parallel.hpp"

namespace cbsq {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * wgk[7];
  double gauss = fc * wg[3];
  for (int i = 0; i < 7; ++i) {
    const double x = h * xgk[i];
    const double s = f(c - x) + f(c + x);
    kron += wgk[i] * s;
    if (i % 2 == 1) gauss += wg[i / 2] * s;
  }
  // Rounding floor on the estimate: tolerances below a few ulps are unattainable.
  const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(kron * h);
  return {a, b, kron * h, std::max(std::abs((kron - gauss) * h), floor)};
}

void require_sheared(const SpectralField& f, const char* what) {
  if (f.frame() != Frame::sheared)
    throw Error(ErrorKind::usage, std::string(what) + ": field must be in the sheared frame");
}

}  // namespace

double shear_heat_phase(int k, double eta, double t, int sigma) {
  const double kk = double(k) * k;
  return sigma * kk * t + eta * eta * t - eta * k * t * t + kk * t * t * t / 3.0;
}

double phase_increment(int k, double eta, double t0, double t1, int sigma) {
  const double a = eta - k * t0;
  const double h = t1 - t0;
  const double kk = double(k) * k;
  return sigma * kk * h + a * a * h - a * k * h * h + kk * h * h * h / 3.0;
}

SpectralField evolve_scalar_exact(const SpectralField& f, double nu, int sigma, double t) {
  require_sheared(f, "evolve_scalar_exact");
  const auto& lat = f.lattice();
  const double t0 = f.time();
  SpectralField out(lat, t, Frame::sheared);
  const int K = lat.kmax, J = lat.jmax;
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (lat.size() > 4096)
  for (int k = -K; k <= K; ++k)
    for (int j = -J; j <= J; ++j)
      out(k, j) = f(k, j) * std::exp(-nu * phase_increment(k, lat.eta(j), t0, t, sigma));
  return out;
}

double duhamel_weight(int k, double eta, double t0, double t, double nu, double mu, int sigma,
                      double quad_tol) {
  if (t == t0) return 0.0;
  if (!(quad_tol > 0.0)) throw Error(ErrorKind::usage, "duhamel_weight: quad_tol must be positive");
  auto integrand = [&](double s) {
    return std::exp(-nu * phase_increment(k, eta, s, t, sigma) - mu * phase_increment(k, eta, t0, s, sigma));
  };
  constexpr std::size_t budget = std::size_t{1} << 16;
  std::priority_queue<Segment> heap;
  Segment first = gk15(integrand, t0, t);
  double value = first.value, error = first.error;
  heap.push(first);
  while (error > quad_tol * std::abs(value) && error > 1e-300) {
    if (heap.size() >= budget)
      throw Error(ErrorKind::accuracy, "duhamel_weight: tolerance not met within the subinterval budget");
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Segment l = gk15(integrand, worst.a, mid);
    const Segment r = gk15(integrand, mid, worst.b);
    value += l.value + r.value - worst.value;
    error += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    if (error < 0.0) error = 0.0;
  }
  // Re-sum to drop accumulated update rounding.
  double total = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    heap.pop();
  }
  return total;
}

LinearState evolve_coupled_exact(const LinearState& s0, double t, double quad_tol) {
  require_sheared(s0.omega, "evolve_coupled_exact");
  require_sheared(s0.theta, "evolve_coupled_exact");
  require_compatible(s0.omega, s0.theta, "evolve_coupled_exact");
  const auto& lat = s0.omega.lattice();
  const auto& p = s0.params;
  LinearState out{SpectralField(lat, t), SpectralField(lat, t), p, t};
  const int K = lat.kmax, J = lat.jmax;
  bool failed = false;
  std::string message;
#pragma omp parallel for schedule(dynamic, 1) num_threads(parallel::max_threads())
  for (int k = -K; k <= K; ++k) {
    for (int j = -J; j <= J; ++j) {
      const double eta = lat.eta(j);
      const double dphi = phase_increment(k, eta, s0.t, t, p.sigma);
      out.theta(k, j) = s0.theta(k, j) * std::exp(-p.mu * dphi);
      cplx w = s0.omega(k, j) * std::exp(-p.nu * dphi);
      const cplx th = s0.theta(k, j);
      if (k != 0 && th != cplx{0.0, 0.0}) {
        try {
          w += cplx{0.0, double(k)} * th * duhamel_weight(k, eta, s0.t, t, p.nu, p.mu, p.sigma, quad_tol);
        } catch (const Error& e) {
#pragma omp critical(cbsq_oracle_fail)
          {
            failed = true;
            message = e.what();
          }
        }
      }
      out.omega(k, j) = w;
    }
  }
  if (failed) throw Error(ErrorKind::accuracy, message);
  return out;
}

LinearState evolve_linear_stepper(const LinearState& s0, double t_end, double dt, Scheme scheme) {
  require_sheared(s0.omega, "evolve_linear_stepper");
  require_compatible(s0.omega, s0.theta, "evolve_linear_stepper");
  if (!(dt > 0.0)) throw Error(ErrorKind::usage, "evolve_linear_stepper: dt must be positive");
  if (t_end < s0.t) throw Error(ErrorKind::usage, "evolve_linear_stepper: t_end precedes the start time");
  const auto& lat = s0.omega.lattice();
  const auto& p = s0.params;
  const double span = t_end - s0.t;
  const long n = span == 0.0 ? 0 : static_cast<long>(std::ceil(span / dt - 1e-12));
  const double h = n == 0 ? 0.0 : span / n;

  LinearState out{SpectralField(lat, t_end), SpectralField(lat, t_end), p, t_end};
  const int K = lat.kmax, J = lat.jmax;
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (lat.size() > 4096)
  for (int k = -K; k <= K; ++k) {
    const cplx ik{0.0, double(k)};
    for (int j = -J; j <= J; ++j) {
      const double eta = lat.eta(j);
      cplx w = s0.omega(k, j), th = s0.theta(k, j);
      for (long i = 0; i < n; ++i) {
        const double ta = s0.t + h * i;
        const double tb = i + 1 == n ? t_end : s0.t + h * (i + 1);
        const double tm = 0.5 * (ta + tb);
        const double e_full = std::exp(-p.nu * phase_increment(k, eta, ta, tb, p.sigma));
        const double e_half = std::exp(-p.nu * phase_increment(k, eta, tm, tb, p.sigma));
        const cplx th_m = th * std::exp(-p.mu * phase_increment(k, eta, ta, tm, p.sigma));
        const cplx th_b = th * std::exp(-p.mu * phase_increment(k, eta, ta, tb, p.sigma));
        const double hb = tb - ta;
        if (scheme == Scheme::midpoint) {
          w = e_full * w + hb * e_half * (ik * th_m);
        } else {
          w = e_full * (w + hb / 6.0 * (ik * th)) + hb * (4.0 / 6.0) * e_half * (ik * th_m) +
              hb / 6.0 * (ik * th_b);
        }
        th = th_b;
      }
      out.omega(k, j) = w;
      out.theta(k, j) = th;
    }
  }
  return out;
}

}  // namespace cbsq
