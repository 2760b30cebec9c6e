#pragma once

#include "cbsq/field.hpp"
#include "cbsq/params.hpp"

namespace cbsq {

/// State of the linearised system (omega, theta) in the sheared frame.
struct LinearState {
  SpectralField omega;
  SpectralField theta;
  PhysicsParams params;
  double t = 0.0;
};

/// Phi(k, eta, t) = int_0^t (sigma k^2 + (eta - k tau)^2) dtau
///               = sigma k^2 t + eta^2 t - eta k t^2 + k^2 t^3 / 3.
double shear_heat_phase(int k, double eta, double t, int sigma);

/// Phi(t1) - Phi(t0), evaluated as a^2 h - a k h^2 + k^2 h^3/3 + sigma k^2 h
/// with a = eta - k t0, h = t1 - t0 (no cancellation for large t).
double phase_increment(int k, double eta, double t0, double t1, int sigma);

/// Exact solution of d_t F + y d_x F = nu (sigma d_xx + d_yy) F from
/// F.time() to t: each sheared coefficient is multiplied by
/// exp(-nu (Phi(t) - Phi(F.time()))).
SpectralField evolve_scalar_exact(const SpectralField& f, double nu, int sigma, double t);

/// Relative-error-controlled integral of exp(-nu dPhi(s->t) - mu dPhi(t0->s))
/// over s in [t0, t]: the Duhamel weight of the buoyancy forcing for one mode.
/// Globally adaptive Gauss-Kronrod 7/15 with bisection, at most 2^16 subintervals;
/// Error(accuracy) if the tolerance cannot be met.
double duhamel_weight(int k, double eta, double t0, double t, double nu, double mu, int sigma,
                      double quad_tol);

/// Semi-analytic solution of the coupled linear system from state0.t to t:
///   Theta(t) = Theta0 exp(-mu dPhi),
///   Omega(t) = Omega0 exp(-nu dPhi) + i k Theta0 * duhamel_weight(...).
LinearState evolve_coupled_exact(const LinearState& state0, double t, double quad_tol = 1e-12);

enum class Scheme { midpoint, rk4 };

/// Time-marched solution: exact integrating factor per step, theta advanced
/// exactly, the i k theta forcing integrated with the midpoint rule (order 2)
/// or Simpson's rule (order 4, what IF-RK4 reduces to for this forcing).
/// Uses n = ceil((t_end - t0)/dt) equal steps.
LinearState evolve_linear_stepper(const LinearState& state0, double t_end, double dt,
                                  Scheme scheme = Scheme::midpoint);

}  // namespace cbsq
