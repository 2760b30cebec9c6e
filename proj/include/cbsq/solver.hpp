#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "cbsq/diagnostics.hpp"
#include "cbsq/field.hpp"
#include "cbsq/linear_oracle.hpp"
#include "cbsq/params.hpp"

namespace cbsq {

/// Full nonlinear state in the sheared frame.
struct SimState {
  SpectralField omega;
  SpectralField theta;
  PhysicsParams params;
  double t = 0.0;
  std::int64_t step_count = 0;
};

struct StepperConfig {
  double dt_max = 0.05;
  double cfl_safety = 0.4;
  Scheme scheme = Scheme::rk4;
  bool nonlinear = true;                 // false: drop transport terms (linear test hook)
  bool buoyancy = true;                  // false: drop the i k theta forcing
  double confinement_threshold = 1e-8;   // outer-band energy fraction that aborts a run
};

/// Time derivative of the non-stiff part: domega = -(u.grad omega) + i k theta,
/// dtheta = -(u.grad theta). Dissipation is handled by the integrating factor.
struct Rhs {
  SpectralField domega;
  SpectralField dtheta;
  double max_speed = 0.0;  // max of |u|, |v|, |u - t v| on the grid
};

Rhs nonlinear_rhs(const SimState& state, const StepperConfig& cfg = {});

/// Dealiased u.grad f with u from omega (both sheared, same time).
SpectralField transport_term(const SpectralField& omega, const SpectralField& f);

/// Fraction of L2 energy in the outer 10% of the retained vertical band
/// (0.9*band_j < |j| <= band_j). 0 for a zero field.
double confinement_fraction(const SpectralField& f);

/// One step: dt = min(dt_max, dt_cap, cfl_safety*min(dz,dy)/max_speed).
/// Integrating factor exp(-nu dPhi) exact; transport and buoyancy by IF-RK4
/// or IF-midpoint. Reality is re-enforced by conjugate averaging and the (0,0)
/// modes are zeroed. Throws Error(nan_abort) or Error(confinement).
SimState step(const SimState& state, const StepperConfig& cfg,
              double dt_cap = std::numeric_limits<double>::infinity());

/// Hook invoked after every report (including t0).
using ReportHook = std::function<void(const SimState&, const EnergyReport&)>;

struct SimulateOptions {
  double checkpoint_every = 0.0;                       // 0 disables
  std::function<void(const SimState&)> on_checkpoint;  // called at each checkpoint time
  ReportHook on_report;
};

struct SimulationResult {
  std::vector<EnergyReport> reports;
  SimState final_state;
};

/// Advances to t_end, landing exactly on every multiple of report_every
/// (measured from t = 0, so split runs resume onto the same time grid).
SimulationResult simulate(const SimState& initial, const StepperConfig& cfg, double t_end,
                          double report_every, const SimulateOptions& options = {});

/// Largest supported horizon for a lattice: t_max = 2 * eta_max = 4 pi jmax / ly.
double t_max(const FrequencyLattice& lattice);

/// Reality-symmetric random coefficients supported on |k| <= kmax/3,
/// |j| <= jmax/3 with a Gaussian envelope, (0,0) zero. Deterministic in seed.
SpectralField random_band_limited(const FrequencyLattice& lattice, std::uint64_t seed,
                                  double time = 0.0);

/// Random field rescaled so ||Lambda_0^b f|| = target_hb. When dx13 is given,
/// a two-parameter fit (separate scale factors on a low-|k| and a high-|k|
/// part) makes || |D_x|^{1/3} Lambda_0^b f || = *dx13 as well (within 1e-10).
/// Error(config) if the pair is infeasible on this lattice.
SpectralField make_initial_field(const FrequencyLattice& lattice, std::uint64_t seed,
                                 double target_hb, double b, std::optional<double> dx13 = {});

struct InitialDataSpec {
  std::uint64_t seed = 1;
  double omega_hb = 0.0;                 // ||omega0||_{H^b}
  double theta_hb = 0.0;                 // ||theta0||_{H^b}
  std::optional<double> theta_dx13;      // || |D_x|^{1/3} theta0 ||_{H^b}
  bool theta_dx13_is_bound = false;      // true: treat theta_dx13 as an upper bound
};

/// Builds omega0 and theta0 from independent seeds derived from spec.seed.
/// With theta_dx13_is_bound, theta is scaled to hit theta_hb unless that would
/// exceed the dx13 bound, in which case the bound is attained instead.
SimState make_initial_data(const FrequencyLattice& lattice, const PhysicsParams& params,
                           const InitialDataSpec& spec);

/// Initial data amplitudes eps nu^beta, eps nu^alpha, eps nu^delta.
InitialDataSpec threshold_data_spec(const PhysicsParams& params, double epsilon,
                                    std::uint64_t seed);

}  // namespace cbsq
