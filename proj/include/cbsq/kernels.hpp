#pragma once

// Pointwise and reduction kernels used by the spectral operators and the time
// stepper. Each kernel exists twice: a plain serial loop (the reference the
// tests compare against) and an OpenMP version. Elementwise kernels give
// bitwise-identical results in both versions. Reductions in the OpenMP
// version sum fixed-size blocks and then add the block partials in order, so
// the result is independent of the thread count.

#include <complex>
#include <cstddef>
#include <span>

namespace cbsq::kernels {

using cplx = std::complex<double>;

inline constexpr std::size_t reduction_block = 2048;

namespace serial {

void scale(std::span<const cplx> in, std::span<const double> w, std::span<cplx> out);
void accumulate(std::span<cplx> out, std::span<const double> w, std::span<const cplx> x, double a);
double weighted_sum_sq(std::span<const cplx> c, std::span<const double> w);
double sum_sq(std::span<const cplx> c);
void transport(std::span<const double> u, std::span<const double> v,
               std::span<const double> fz, std::span<const double> fy,
               std::span<double> out);
double max_speed(std::span<const double> u, std::span<const double> v, double t);
void multiply(std::span<const double> f, std::span<const double> g, std::span<double> out);

}  // namespace serial

namespace omp {

void scale(std::span<const cplx> in, std::span<const double> w, std::span<cplx> out);
void accumulate(std::span<cplx> out, std::span<const double> w, std::span<const cplx> x, double a);
double weighted_sum_sq(std::span<const cplx> c, std::span<const double> w);
double sum_sq(std::span<const cplx> c);
void transport(std::span<const double> u, std::span<const double> v,
               std::span<const double> fz, std::span<const double> fy,
               std::span<double> out);
double max_speed(std::span<const double> u, std::span<const double> v, double t);
void multiply(std::span<const double> f, std::span<const double> g, std::span<double> out);

}  // namespace omp

// Library code calls these; they forward to the OpenMP versions.

/// out[i] = w[i] * in[i]
inline void scale(std::span<const cplx> in, std::span<const double> w, std::span<cplx> out) {
  omp::scale(in, w, out);
}
/// out[i] += a * w[i] * x[i]
inline void accumulate(std::span<cplx> out, std::span<const double> w, std::span<const cplx> x, double a) {
  omp::accumulate(out, w, x, a);
}
/// sum w[i] |c[i]|^2
inline double weighted_sum_sq(std::span<const cplx> c, std::span<const double> w) {
  return omp::weighted_sum_sq(c, w);
}
inline double sum_sq(std::span<const cplx> c) { return omp::sum_sq(c); }
/// out = u*fz + v*fy on grid points.
inline void transport(std::span<const double> u, std::span<const double> v,
                      std::span<const double> fz, std::span<const double> fy,
                      std::span<double> out) {
  omp::transport(u, v, fz, fy, out);
}
/// max over points of max(|u|, |v|, |u - t v|): transport speeds in the
/// sheared coordinates (z = x - t y, y).
inline double max_speed(std::span<const double> u, std::span<const double> v, double t) {
  return omp::max_speed(u, v, t);
}
inline void multiply(std::span<const double> f, std::span<const double> g, std::span<double> out) {
  omp::multiply(f, g, out);
}

}  // namespace cbsq::kernels
