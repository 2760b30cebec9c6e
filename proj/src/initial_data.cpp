#include <algorithm>
#include <cmath>
#include <random>

#include "cbsq/errors.hpp"
#include "cbsq/solver.hpp"
#include "cbsq/spectral_ops.hpp"
#include "splitmix.hpp"

namespace cbsq {

namespace {

double sq_norm(const SpectralField& f, const std::vector<double>& w) {
  const double n = weighted_l2_norm(f, w);
  return n * n;
}

std::vector<double> dx13_weight(const FrequencyLattice& lat, const std::vector<double>& lam) {
  std::vector<double> w = lam;
  for (int k = -lat.kmax; k <= lat.kmax; ++k)
    for (int j = -lat.jmax; j <= lat.jmax; ++j) w[lat.index(k, j)] *= std::cbrt(double(k) * k);
  return w;
}

}  // namespace

SpectralField random_band_limited(const FrequencyLattice& lat, std::uint64_t seed, double time) {
  SpectralField f(lat, time);
  const int kc = std::max(1, lat.kmax / 3);
  const int jc = std::max(1, lat.jmax / 3);
  std::mt19937_64 rng(detail::splitmix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k <= kc; ++k) {
    for (int j = -jc; j <= jc; ++j) {
      if (k == 0 && j <= 0) continue;
      const double rk = double(k) / kc, rj = double(j) / jc;
      const double env = std::exp(-4.5 * (rk * rk + rj * rj));
      const double re = normal(rng), im = normal(rng);
      const cplx c{env * re, env * im};
      f(k, j) = c;
      f(-k, -j) = std::conj(c);
    }
  }
  return f;
}

SpectralField make_initial_field(const FrequencyLattice& lat, std::uint64_t seed, double target_hb,
                                 double b, std::optional<double> dx13) {
  if (!(target_hb >= 0.0) || !std::isfinite(target_hb))
    throw Error(ErrorKind::config, "initial data: H^b target must be finite and nonnegative");
  if (target_hb == 0.0) {
    if (dx13 && *dx13 != 0.0) throw Error(ErrorKind::config, "initial data: nonzero dx13 target with zero H^b target");
    return SpectralField(lat);
  }
  const SpectralField f = random_band_limited(lat, seed);
  const auto lam = lambda_shear_weight(lat, 0.0, 2.0 * b);  // squared weight
  if (!dx13) {
    SpectralField out = f;
    out *= target_hb / std::sqrt(sq_norm(f, lam));
    return out;
  }
  if (!(*dx13 > 0.0) || !std::isfinite(*dx13))
    throw Error(ErrorKind::config, "initial data: dx13 target must be positive");

  // Two-parameter fit: out = a*low + c*high with low = |k| < split, high = the rest.
  const int split = std::max(1, (lat.kmax / 3) / 2);
  SpectralField low(lat), high(lat);
  for (int k = -lat.kmax; k <= lat.kmax; ++k)
    for (int j = -lat.jmax; j <= lat.jmax; ++j) (std::abs(k) < split ? low : high)(k, j) = f(k, j);
  const auto lamd = dx13_weight(lat, lam);
  const double lh = sq_norm(low, lam), hh = sq_norm(high, lam);
  const double ld = sq_norm(low, lamd), hd = sq_norm(high, lamd);
  const double th = target_hb * target_hb, td = *dx13 * *dx13;
  const double det = lh * hd - hh * ld;
  const double a2 = (th * hd - hh * td) / det;
  const double c2 = (lh * td - th * ld) / det;
  if (!(det != 0.0) || !(a2 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(a2) || !std::isfinite(c2))
    throw Error(ErrorKind::config, "initial data: H^b and |D_x|^{1/3} H^b targets are jointly infeasible on this lattice");
  low *= std::sqrt(a2);
  high *= std::sqrt(c2);
  SpectralField out = low + high;
  return out;
}

SimState make_initial_data(const FrequencyLattice& lat, const PhysicsParams& params,
                           const InitialDataSpec& spec) {
  const std::uint64_t omega_seed = detail::splitmix64(spec.seed ^ 0x6F6D656761ull);
  const std::uint64_t theta_seed = detail::splitmix64(spec.seed ^ 0x7468657461ull);
  SimState s{SpectralField(lat), SpectralField(lat), params, 0.0, 0};
  s.omega = make_initial_field(lat, omega_seed, spec.omega_hb, params.b);
  if (spec.theta_dx13 && spec.theta_dx13_is_bound) {
    if (!(*spec.theta_dx13 >= 0.0)) throw Error(ErrorKind::config, "initial data: dx13 bound must be nonnegative");
    SpectralField th = make_initial_field(lat, theta_seed, spec.theta_hb, params.b);
    const auto lamd = dx13_weight(lat, lambda_shear_weight(lat, 0.0, 2.0 * params.b));
    const double d = std::sqrt(sq_norm(th, lamd));
    if (d > *spec.theta_dx13) th *= *spec.theta_dx13 / d;
    s.theta = std::move(th);
  } else {
    s.theta = make_initial_field(lat, theta_seed, spec.theta_hb, params.b, spec.theta_dx13);
  }
  return s;
}

InitialDataSpec threshold_data_spec(const PhysicsParams& params, double epsilon, std::uint64_t seed) {
  InitialDataSpec spec;
  spec.seed = seed;
  spec.omega_hb = epsilon * std::pow(params.nu, params.beta);
  spec.theta_hb = epsilon * std::pow(params.nu, params.alpha);
  spec.theta_dx13 = epsilon * std::pow(params.nu, params.delta);
  spec.theta_dx13_is_bound = true;
  return spec;
}

}  // namespace cbsq
