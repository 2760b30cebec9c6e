#include "cbsq/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cbsq/errors.hpp"
#include "cbsq/kernels.hpp"
#include "cbsq/transform.hpp"
#include "tabulate.hpp"

namespace cbsq {

std::vector<double> lambda_shear_weight(const FrequencyLattice& lattice, double t, double b,
                                        Frame frame) {
  const double half_b = 0.5 * b;
  if (frame == Frame::sheared) {
    return detail::tabulate(lattice, [&](int k, int j) {
      const double eta = lattice.eta(j);
      return std::pow(1.0 + double(k) * k + eta * eta, half_b);
    });
  }
  return detail::tabulate(lattice, [&](int k, int j) {
    const double eta = lattice.eta(j) + k * t;
    return std::pow(1.0 + double(k) * k + eta * eta, half_b);
  });
}

SpectralField fractional_dx(const SpectralField& field, double gamma) {
  const auto& lat = field.lattice();
  if (gamma < 0.0) {
    for (int j = -lat.jmax; j <= lat.jmax; ++j)
      if (field(0, j) != cplx{0.0, 0.0})
        throw Error(ErrorKind::domain, "fractional_dx: negative order applied to a field with k = 0 content");
  }
  SpectralField out(lat, field.time(), field.frame());
  const auto w = detail::tabulate(lat, [&](int k, int) {
    if (k == 0) return gamma == 0.0 ? 1.0 : 0.0;
    return std::pow(std::abs(double(k)), gamma);
  });
  kernels::scale(field.coeffs(), w, out.coeffs());
  return out;
}

SpectralField project_zero(const SpectralField& field) {
  const auto& lat = field.lattice();
  SpectralField out(lat, field.time(), field.frame());
  for (int j = -lat.jmax; j <= lat.jmax; ++j) out(0, j) = field(0, j);
  return out;
}

SpectralField project_nonzero(const SpectralField& field) {
  SpectralField out = field;
  const auto& lat = field.lattice();
  for (int j = -lat.jmax; j <= lat.jmax; ++j) out(0, j) = cplx{0.0, 0.0};
  return out;
}

Velocity biot_savart(const SpectralField& omega, double t) {
  if (omega(0, 0) != cplx{0.0, 0.0})
    throw Error(ErrorKind::precondition, "biot_savart: vorticity has a nonzero (0,0) coefficient");
  const auto& lat = omega.lattice();
  Velocity vel{SpectralField(lat, omega.time(), omega.frame()),
               SpectralField(lat, omega.time(), omega.frame())};
  const double shift = omega.frame() == Frame::sheared ? t : 0.0;
  const int K = lat.kmax, J = lat.jmax;
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (lat.size() > 4096)
  for (int k = -K; k <= K; ++k) {
    for (int j = -J; j <= J; ++j) {
      const double xi = lat.eta(j) - k * shift;
      const double denom = double(k) * k + xi * xi;
      if (denom == 0.0) continue;
      const cplx w = omega(k, j);
      vel.u(k, j) = cplx{0.0, xi / denom} * w;
      vel.v(k, j) = cplx{0.0, -double(k) / denom} * w;
    }
  }
  return vel;
}

void apply_dealias_mask(SpectralField& field) {
  const auto& lat = field.lattice();
  for (int k = -lat.kmax; k <= lat.kmax; ++k)
    for (int j = -lat.jmax; j <= lat.jmax; ++j)
      if (!lat.in_band(k, j)) field(k, j) = cplx{0.0, 0.0};
}

bool is_band_limited(const SpectralField& field) {
  const auto& lat = field.lattice();
  for (int k = -lat.kmax; k <= lat.kmax; ++k)
    for (int j = -lat.jmax; j <= lat.jmax; ++j)
      if (!lat.in_band(k, j) && field(k, j) != cplx{0.0, 0.0}) return false;
  return true;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  require_compatible(f, g, "dealiased_product");
  const auto& lat = f.lattice();
  SpectralField fm = f, gm = g;
  apply_dealias_mask(fm);
  apply_dealias_mask(gm);
  const GridTransform tr(lat);
  std::vector<double> fg(lat.size()), gg(lat.size());
  tr.to_grid(fm.coeffs(), fg);
  tr.to_grid(gm.coeffs(), gg);
  kernels::multiply(fg, gg, fg);
  SpectralField out(lat, f.time(), f.frame());
  tr.from_grid(fg, out.coeffs());
  apply_dealias_mask(out);
  return out;
}

double weighted_l2_norm(const SpectralField& field, const std::vector<double>& weight) {
  if (weight.size() != field.lattice().size())
    throw Error(ErrorKind::usage, "weighted_l2_norm: weight array does not match the lattice");
  for (double w : weight)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::domain, "weighted_l2_norm: weights must be finite and nonnegative");
  return std::sqrt(kernels::weighted_sum_sq(field.coeffs(), weight) * field.lattice().cell_measure());
}

double l2_norm(const SpectralField& field) {
  return std::sqrt(kernels::sum_sq(field.coeffs()) * field.lattice().cell_measure());
}

cplx inner_product(const SpectralField& f, const SpectralField& g) {
  require_compatible(f, g, "inner_product");
  cplx s{0.0, 0.0};
  const auto a = f.coeffs();
  const auto b = g.coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s * f.lattice().cell_measure();
}

std::vector<double> to_grid(const SpectralField& field) {
  const GridTransform tr(field.lattice());
  std::vector<double> grid(field.lattice().size());
  tr.to_grid(field.coeffs(), grid);
  return grid;
}

SpectralField from_grid(const FrequencyLattice& lattice, const std::vector<double>& grid, double time,
                        Frame frame) {
  if (grid.size() != lattice.size()) throw Error(ErrorKind::usage, "from_grid: grid size mismatch");
  const GridTransform tr(lattice);
  SpectralField out(lattice, time, frame);
  tr.from_grid(grid, out.coeffs());
  return out;
}

double grid_linf_norm(const SpectralField& field) {
  const auto grid = to_grid(field);
  double m = 0.0;
  for (double v : grid) m = std::max(m, std::abs(v));
  return m;
}

double grid_l2_norm(const SpectralField& field) {
  const auto grid = to_grid(field);
  double s = 0.0;
  for (double v : grid) s += v * v;
  return std::sqrt(s * field.lattice().dz() * field.lattice().dy());
}

double linf_embedding_constant(const FrequencyLattice& lattice, double b) {
  double s = 0.0;
  for (int k = -lattice.kmax; k <= lattice.kmax; ++k)
    for (int j = -lattice.jmax; j <= lattice.jmax; ++j) {
      const double eta = lattice.eta(j);
      s += std::pow(1.0 + double(k) * k + eta * eta, -b);
    }
  return std::sqrt(s / lattice.cell_measure());
}

SpectralField unshear(const SpectralField& sheared) {
  if (sheared.frame() != Frame::sheared)
    throw Error(ErrorKind::usage, "unshear: field is not in the sheared frame");
  const auto& lat = sheared.lattice();
  const double t = sheared.time();
  const double s_real = t * lat.ly / (2.0 * std::numbers::pi);
  const double s_round = std::round(s_real);
  if (std::abs(s_real - s_round) > 1e-9 * std::max(1.0, std::abs(s_real)))
    throw Error(ErrorKind::usage, "unshear: t * ly / (2 pi) must be an integer");
  const int s = static_cast<int>(s_round);
  const FrequencyLattice lab_lat(lat.kmax, lat.jmax + lat.kmax * std::abs(s), lat.ly);
  SpectralField lab(lab_lat, t, Frame::lab);
  for (int k = -lat.kmax; k <= lat.kmax; ++k)
    for (int j = -lat.jmax; j <= lat.jmax; ++j) lab(k, j - k * s) = sheared(k, j);
  return lab;
}

}  // namespace cbsq
