#pragma once

#include <span>

#include "cbsq/field.hpp"

namespace cbsq {

/// Real <-> spectral transforms between a SpectralField and its values on the
/// (2*kmax+1) x (2*jmax+1) collocation grid.
///
/// Grid layout is y-major: grid[l * nz + i] holds the value at
/// (z_i, y_l) = (2*pi*i/nz, ly*l/ny). Synthesis is
///   f(z_i, y_l) = sum_{k,j} c(k,j) exp(i (k z_i + eta_j y_l))
/// and analysis divides by nz*ny, so the pair is an exact inverse on the
/// lattice. Calls are safe from several threads at once: FFTW plans are
/// created once per grid shape under a lock and executed on per-call arrays.
class GridTransform {
 public:
  explicit GridTransform(const FrequencyLattice& lattice);

  const FrequencyLattice& lattice() const { return lattice_; }
  std::size_t grid_size() const { return lattice_.size(); }

  /// Coefficients (full lattice layout) -> grid values. Assumes reality
  /// symmetry; only the k >= 0 half is read.
  void to_grid(std::span<const cplx> coeffs, std::span<double> grid) const;
  /// Grid values -> coefficients over the full lattice, exactly Hermitian.
  void from_grid(std::span<const double> grid, std::span<cplx> coeffs) const;

 private:
  FrequencyLattice lattice_;
  void* forward_ = nullptr;   // fftw_plan (r2c)
  void* backward_ = nullptr;  // fftw_plan (c2r)
};

}  // namespace cbsq
