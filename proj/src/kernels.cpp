#include "cbsq/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cbsq/parallel.hpp"

namespace cbsq::kernels {

namespace {
// Below this many elements the thread start-up costs more than the loop.
constexpr std::ptrdiff_t parallel_threshold = 4096;

std::ptrdiff_t ssize(std::size_t n) { return static_cast<std::ptrdiff_t>(n); }
}  // namespace

namespace serial {

void scale(std::span<const cplx> in, std::span<const double> w, std::span<cplx> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = w[i] * in[i];
}

void accumulate(std::span<cplx> out, std::span<const double> w, std::span<const cplx> x, double a) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += (a * w[i]) * x[i];
}

double weighted_sum_sq(std::span<const cplx> c, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += w[i] * std::norm(c[i]);
  return s;
}

double sum_sq(std::span<const cplx> c) {
  double s = 0.0;
  for (const auto& z : c) s += std::norm(z);
  return s;
}

void transport(std::span<const double> u, std::span<const double> v, std::span<const double> fz,
               std::span<const double> fy, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u[i] * fz[i] + v[i] * fy[i];
}

double max_speed(std::span<const double> u, std::span<const double> v, double t) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    m = std::max({m, std::abs(u[i]), std::abs(v[i]), std::abs(u[i] - t * v[i])});
  return m;
}

void multiply(std::span<const double> f, std::span<const double> g, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] * g[i];
}

}  // namespace serial

namespace omp {

void scale(std::span<const cplx> in, std::span<const double> w, std::span<cplx> out) {
  const std::ptrdiff_t n = ssize(in.size());
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = w[i] * in[i];
}

void accumulate(std::span<cplx> out, std::span<const double> w, std::span<const cplx> x, double a) {
  const std::ptrdiff_t n = ssize(out.size());
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] += (a * w[i]) * x[i];
}

namespace {
// Fixed-block reduction: partial sums per block, then an ordered serial sum.
template <typename BlockSum>
double blocked_sum(std::size_t n, BlockSum&& block_sum) {
  const std::size_t nblocks = (n + reduction_block - 1) / reduction_block;
  std::vector<double> partial(nblocks, 0.0);
  const std::ptrdiff_t nb = ssize(nblocks);
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (nb > 1)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
    const std::size_t hi = std::min(n, lo + reduction_block);
    partial[static_cast<std::size_t>(b)] = block_sum(lo, hi);
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}
}  // namespace

double weighted_sum_sq(std::span<const cplx> c, std::span<const double> w) {
  return blocked_sum(c.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += w[i] * std::norm(c[i]);
    return s;
  });
}

double sum_sq(std::span<const cplx> c) {
  return blocked_sum(c.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::norm(c[i]);
    return s;
  });
}

void transport(std::span<const double> u, std::span<const double> v, std::span<const double> fz,
               std::span<const double> fy, std::span<double> out) {
  const std::ptrdiff_t n = ssize(out.size());
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = u[i] * fz[i] + v[i] * fy[i];
}

double max_speed(std::span<const double> u, std::span<const double> v, double t) {
  const std::ptrdiff_t n = ssize(u.size());
  double m = 0.0;
  // max is exact, so the reduction order does not matter.
#pragma omp parallel for schedule(static) reduction(max : m) num_threads(parallel::max_threads()) \
    if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    m = std::max({m, std::abs(u[i]), std::abs(v[i]), std::abs(u[i] - t * v[i])});
  return m;
}

void multiply(std::span<const double> f, std::span<const double> g, std::span<double> out) {
  const std::ptrdiff_t n = ssize(out.size());
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (n > parallel_threshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f[i] * g[i];
}

}  // namespace omp

}  // namespace cbsq::kernels
