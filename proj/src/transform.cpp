#include "cbsq/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace cbsq {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// The FFTW planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans live for the whole process.
std::mutex g_plan_mutex;

PlanPair plans_for(int ny, int nz) {
  std::lock_guard lock(g_plan_mutex);
  static std::map<std::pair<int, int>, PlanPair> cache;
  auto it = cache.find({ny, nz});
  if (it != cache.end()) return it->second;

  const std::size_t n_real = static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  const std::size_t n_half = static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz / 2 + 1);
  double* real = fftw_alloc_real(n_real);
  fftw_complex* half = fftw_alloc_complex(n_half);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(ny, nz, real, half, flags);
  p.backward = fftw_plan_dft_c2r_2d(ny, nz, half, real, flags);
  fftw_free(real);
  fftw_free(half);
  cache.emplace(std::make_pair(ny, nz), p);
  return p;
}

int wrap(int j, int n) { return j < 0 ? j + n : j; }

}  // namespace

GridTransform::GridTransform(const FrequencyLattice& lattice) : lattice_(lattice) {
  const PlanPair p = plans_for(lattice.nj(), lattice.nk());
  forward_ = p.forward;
  backward_ = p.backward;
}

void GridTransform::to_grid(std::span<const cplx> coeffs, std::span<double> grid) const {
  const int K = lattice_.kmax, J = lattice_.jmax;
  const int nz = lattice_.nk(), ny = lattice_.nj();
  const int nh = nz / 2 + 1;  // == K + 1 for odd nz
  std::vector<cplx> half(static_cast<std::size_t>(ny) * static_cast<std::size_t>(nh));
  for (int k = 0; k <= K; ++k)
    for (int j = -J; j <= J; ++j)
      half[static_cast<std::size_t>(wrap(j, ny)) * nh + k] = coeffs[lattice_.index(k, j)];
  fftw_execute_dft_c2r(static_cast<fftw_plan>(backward_),
                       reinterpret_cast<fftw_complex*>(half.data()), grid.data());
}

void GridTransform::from_grid(std::span<const double> grid, std::span<cplx> coeffs) const {
  const int K = lattice_.kmax, J = lattice_.jmax;
  const int nz = lattice_.nk(), ny = lattice_.nj();
  const int nh = nz / 2 + 1;
  std::vector<cplx> half(static_cast<std::size_t>(ny) * static_cast<std::size_t>(nh));
  // r2c never writes its input, the cast only satisfies the C signature.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_), const_cast<double*>(grid.data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
  const double scale = 1.0 / (static_cast<double>(nz) * static_cast<double>(ny));
  for (int k = 0; k <= K; ++k) {
    for (int j = -J; j <= J; ++j) {
      if (k == 0 && j < 0) continue;
      cplx c = half[static_cast<std::size_t>(wrap(j, ny)) * nh + k] * scale;
      if (k == 0 && j == 0) c = cplx{c.real(), 0.0};
      coeffs[lattice_.index(k, j)] = c;
      coeffs[lattice_.index(-k, -j)] = std::conj(c);
    }
  }
}

}  // namespace cbsq
