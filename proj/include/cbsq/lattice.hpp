#pragma once

#include <cstddef>
#include <numbers>

namespace cbsq {

/// Truncated Fourier lattice for T x (periodised R).
///
/// Horizontal wavenumbers are k in {-kmax..kmax} (x-period 2*pi), vertical
/// wavenumbers eta_j = (2*pi/ly) * j for j in {-jmax..jmax}. The matching
/// collocation grid has (2*kmax+1) x (2*jmax+1) points, both odd, so every mode
/// has an unambiguous conjugate partner.
///
/// Storage order everywhere (fields, weight arrays, checkpoints) is row-major
/// k-then-j: index = (k + kmax) * (2*jmax + 1) + (j + jmax).
struct FrequencyLattice {
  int kmax = 32;
  int jmax = 256;
  double ly = 16.0 * std::numbers::pi;

  FrequencyLattice() = default;
  /// Throws ConfigError on kmax < 1, jmax < 1 or ly <= 0.
  FrequencyLattice(int kmax, int jmax, double ly);

  int nk() const { return 2 * kmax + 1; }
  int nj() const { return 2 * jmax + 1; }
  std::size_t size() const { return static_cast<std::size_t>(nk()) * static_cast<std::size_t>(nj()); }

  std::size_t index(int k, int j) const {
    return static_cast<std::size_t>(k + kmax) * static_cast<std::size_t>(nj()) +
           static_cast<std::size_t>(j + jmax);
  }
  int k_of(std::size_t idx) const { return static_cast<int>(idx / static_cast<std::size_t>(nj())) - kmax; }
  int j_of(std::size_t idx) const { return static_cast<int>(idx % static_cast<std::size_t>(nj())) - jmax; }

  double eta_spacing() const { return 2.0 * std::numbers::pi / ly; }
  double eta(int j) const { return eta_spacing() * j; }
  double eta_max() const { return eta(jmax); }

  double dz() const { return 2.0 * std::numbers::pi / nk(); }
  double dy() const { return ly / nj(); }

  /// |T x [0,ly)|; multiplies sum |c|^2 to give the squared L2 norm.
  double cell_measure() const { return 2.0 * std::numbers::pi * ly; }

  // 2/3-rule retained band on the (2K+1) x (2J+1) grid.
  int band_k() const { return (2 * kmax) / 3; }
  int band_j() const { return (2 * jmax) / 3; }
  bool in_band(int k, int j) const {
    return (k < 0 ? -k : k) <= band_k() && (j < 0 ? -j : j) <= band_j();
  }

  bool operator==(const FrequencyLattice&) const = default;
};

}  // namespace cbsq
