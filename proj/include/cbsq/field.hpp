#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "cbsq/lattice.hpp"

namespace cbsq {

using cplx = std::complex<double>;

/// Coordinate frame a set of coefficients refers to. Sheared coefficients are
/// indexed by eta = xi + k t (the canonical storage); lab coefficients by xi.
enum class Frame : std::uint8_t { sheared, lab };

/// Complex Fourier coefficients over a FrequencyLattice at physical time t.
///
/// The full lattice (both signs of k) is stored; real-valued fields satisfy
/// c(-k,-j) = conj(c(k,j)), which enforce_reality() restores exactly.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const FrequencyLattice& lattice, double time = 0.0,
                         Frame frame = Frame::sheared);

  const FrequencyLattice& lattice() const { return lattice_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  Frame frame() const { return frame_; }

  cplx& operator()(int k, int j) { return coeffs_[lattice_.index(k, j)]; }
  const cplx& operator()(int k, int j) const { return coeffs_[lattice_.index(k, j)]; }

  std::span<cplx> coeffs() { return coeffs_; }
  std::span<const cplx> coeffs() const { return coeffs_; }

  bool is_zero() const;
  bool all_finite() const;

  /// Replaces each conjugate pair by its average and zeroes Im c(0,0).
  void enforce_reality();
  /// max |c(k,j) - conj(c(-k,-j))|.
  double reality_defect() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

  /// Bitwise equality of lattice, time, frame and every coefficient.
  bool identical(const SpectralField& other) const;

 private:
  FrequencyLattice lattice_{};
  double time_ = 0.0;
  Frame frame_ = Frame::sheared;
  std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Throws Error(usage) unless both fields share lattice, time and frame.
void require_compatible(const SpectralField& a, const SpectralField& b, const char* what);

}  // namespace cbsq
