#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cbsq/kernels.hpp"
#include "cbsq/solver.hpp"
#include "cbsq/spectral_ops.hpp"

namespace {

using cbsq::kernels::cplx;

std::vector<double> random_reals(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

std::vector<cplx> random_complex(std::size_t n, unsigned seed) {
  const auto re = random_reals(n, seed), im = random_reals(n, seed + 1);
  std::vector<cplx> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
  return v;
}

template <bool Omp>
void BM_transport(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto u = random_reals(n, 1), v = random_reals(n, 2), fz = random_reals(n, 3), fy = random_reals(n, 4);
  std::vector<double> out(n);
  for (auto _ : st) {
    if constexpr (Omp) cbsq::kernels::omp::transport(u, v, fz, fy, out);
    else cbsq::kernels::serial::transport(u, v, fz, fy, out);
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

template <bool Omp>
void BM_weighted_sum_sq(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto c = random_complex(n, 5);
  const auto w = random_reals(n, 7);
  for (auto _ : st) {
    double s = Omp ? cbsq::kernels::omp::weighted_sum_sq(c, w) : cbsq::kernels::serial::weighted_sum_sq(c, w);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

template <bool Omp>
void BM_max_speed(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto u = random_reals(n, 8), v = random_reals(n, 9);
  for (auto _ : st) {
    double s = Omp ? cbsq::kernels::omp::max_speed(u, v, 3.0) : cbsq::kernels::serial::max_speed(u, v, 3.0);
    benchmark::DoNotOptimize(s);
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n));
}

void BM_dealiased_product(benchmark::State& st) {
  const cbsq::FrequencyLattice lat(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 16.0 * 3.141592653589793);
  const auto f = cbsq::random_band_limited(lat, 1), g = cbsq::random_band_limited(lat, 2);
  for (auto _ : st) {
    auto p = cbsq::dealiased_product(f, g);
    benchmark::DoNotOptimize(p.coeffs().data());
  }
}

void BM_nonlinear_rhs(benchmark::State& st) {
  const cbsq::FrequencyLattice lat(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)), 16.0 * 3.141592653589793);
  cbsq::SimState s{cbsq::random_band_limited(lat, 3), cbsq::random_band_limited(lat, 4), {}, 0.0, 0};
  for (auto _ : st) {
    auto r = cbsq::nonlinear_rhs(s);
    benchmark::DoNotOptimize(r.domega.coeffs().data());
  }
}

constexpr long small = 1 << 12, large = 1 << 20;

}  // namespace

BENCHMARK(BM_transport<false>)->Range(small, large);
BENCHMARK(BM_transport<true>)->Range(small, large);
BENCHMARK(BM_weighted_sum_sq<false>)->Range(small, large);
BENCHMARK(BM_weighted_sum_sq<true>)->Range(small, large);
BENCHMARK(BM_max_speed<false>)->Range(small, large);
BENCHMARK(BM_max_speed<true>)->Range(small, large);
BENCHMARK(BM_dealiased_product)->Args({16, 128})->Args({32, 256});
BENCHMARK(BM_nonlinear_rhs)->Args({16, 128})->Args({32, 256});

BENCHMARK_MAIN();
