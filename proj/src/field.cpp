#include "cbsq/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cbsq/errors.hpp"

namespace cbsq {

SpectralField::SpectralField(const FrequencyLattice& lattice, double time, Frame frame)
    : lattice_(lattice), time_(time), frame_(frame), coeffs_(lattice.size(), cplx{0.0, 0.0}) {}

bool SpectralField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const cplx& c) { return c.real() == 0.0 && c.imag() == 0.0; });
}

bool SpectralField::all_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const cplx& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

void SpectralField::enforce_reality() {
  const int K = lattice_.kmax, J = lattice_.jmax;
  for (int k = 0; k <= K; ++k) {
    for (int j = -J; j <= J; ++j) {
      if (k == 0 && j < 0) continue;
      cplx& a = (*this)(k, j);
      cplx& b = (*this)(-k, -j);
      if (&a == &b) {
        a = cplx{a.real(), 0.0};
        continue;
      }
      const cplx avg = 0.5 * (a + std::conj(b));
      a = avg;
      b = std::conj(avg);
    }
  }
}

double SpectralField::reality_defect() const {
  double worst = 0.0;
  const int K = lattice_.kmax, J = lattice_.jmax;
  for (int k = -K; k <= K; ++k)
    for (int j = -J; j <= J; ++j)
      worst = std::max(worst, std::abs((*this)(k, j) - std::conj((*this)(-k, -j))));
  return worst;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_compatible(*this, other, "operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_compatible(*this, other, "operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

bool SpectralField::identical(const SpectralField& other) const {
  if (!(lattice_ == other.lattice_) || frame_ != other.frame_) return false;
  if (std::memcmp(&time_, &other.time_, sizeof(double)) != 0) return false;
  return coeffs_.size() == other.coeffs_.size() &&
         std::memcmp(coeffs_.data(), other.coeffs_.data(), coeffs_.size() * sizeof(cplx)) == 0;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

void require_compatible(const SpectralField& a, const SpectralField& b, const char* what) {
  if (!(a.lattice() == b.lattice()))
    throw Error(ErrorKind::usage, std::string(what) + ": lattice mismatch");
  if (a.frame() != b.frame()) throw Error(ErrorKind::usage, std::string(what) + ": frame mismatch");
  if (a.time() != b.time()) throw Error(ErrorKind::usage, std::string(what) + ": time mismatch");
}

}  // namespace cbsq
