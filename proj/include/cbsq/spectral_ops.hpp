#pragma once

#include <utility>
#include <vector>

#include "cbsq/field.hpp"

namespace cbsq {

/// Symbol of Lambda_t^b on the lattice: (1 + k^2 + (xi + t k)^2)^{b/2}.
/// In the sheared frame the lattice coordinate already is eta = xi + t k, so
/// the weight is (1 + k^2 + eta^2)^{b/2} independent of t.
std::vector<double> lambda_shear_weight(const FrequencyLattice& lattice, double t, double b,
                                        Frame frame = Frame::sheared);

/// Multiplies every coefficient by |k|^gamma. For gamma < 0 the k = 0 row must
/// vanish (Error(domain) otherwise) and is left at zero.
SpectralField fractional_dx(const SpectralField& field, double gamma);

/// x-average (k = 0 row) and its complement; their sum is the input exactly.
SpectralField project_zero(const SpectralField& field);
SpectralField project_nonzero(const SpectralField& field);

struct Velocity {
  SpectralField u;
  SpectralField v;
};

/// u = -grad^perp (-Delta)^{-1} omega in the frame of `omega` at time t.
/// With xi = eta - k t (sheared) or the lattice xi (lab):
///   u^ = i xi / (k^2 + xi^2) W,  v^ = -i k / (k^2 + xi^2) W,
/// and both vanish where k = xi = 0. Throws Error(precondition) when the (0,0)
/// coefficient of omega is nonzero.
Velocity biot_savart(const SpectralField& omega, double t);

/// Zeroes every coefficient outside the 2/3-rule band.
void apply_dealias_mask(SpectralField& field);
bool is_band_limited(const SpectralField& field);

/// Coefficients of the pointwise product f*g: both inputs are truncated to
/// the 2/3 band, multiplied on the collocation grid, and the result is
/// truncated to the band again. Exact (no aliasing) for band-limited inputs.
/// Throws Error(usage) unless f and g share lattice, time and frame.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

/// sqrt( sum weight(k,j) |c(k,j)|^2 * cell_measure ). Weight must be finite and
/// nonnegative (Error(domain) otherwise).
double weighted_l2_norm(const SpectralField& field, const std::vector<double>& weight);
double l2_norm(const SpectralField& field);

/// Plain L2 inner product <f, g> = cell_measure * sum c_f conj(c_g).
cplx inner_product(const SpectralField& f, const SpectralField& g);

/// Values on the collocation grid, and their maximum modulus.
std::vector<double> to_grid(const SpectralField& field);
SpectralField from_grid(const FrequencyLattice& lattice, const std::vector<double>& grid,
                        double time = 0.0, Frame frame = Frame::sheared);
double grid_linf_norm(const SpectralField& field);

/// Discrete physical-space L2 norm: sqrt(dz*dy*sum f(z_i,y_l)^2).
double grid_l2_norm(const SpectralField& field);

/// Constant C in ||f||_inf <= C ||Lambda^b f||_2 for lattice-supported f:
/// C = sqrt( sum (1 + k^2 + eta^2)^{-b} / cell_measure ).
double linf_embedding_constant(const FrequencyLattice& lattice, double b);

/// Re-expresses a sheared-frame field in lab coordinates. Requires
/// s = t*ly/(2*pi) to be an integer (within 1e-9); the lab lattice is widened
/// to jmax + kmax*s so no coefficient is lost.
SpectralField unshear(const SpectralField& sheared);

}  // namespace cbsq
