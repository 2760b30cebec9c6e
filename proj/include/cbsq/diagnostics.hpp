#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbsq/field.hpp"
#include "cbsq/params.hpp"

namespace cbsq {

/// Norms of one field at one time. Every entry is an L2 norm computed in the
/// frame the field is stored in, with diagonal weights
///   Lambda_t^b <-> (1 + k^2 + eta^2)^{b/2}   (eta = xi + k t)
///   D_y        <-> |xi|,  D_x <-> |k|,  |D_x|^g <-> |k|^g
///   (-Delta)^{-1/2} on k != 0 <-> (k^2 + xi^2)^{-1/2}
///   sqrt(M) evaluated at (k, xi).
struct NormBundle {
  double lambda_b_l2 = 0.0;          // ||Lambda^b f||
  double dy_lambda_b = 0.0;          // ||D_y Lambda^b f||
  double dx_lambda_b = 0.0;          // ||D_x Lambda^b f||
  double dx13_lambda_b = 0.0;        // || |D_x|^{1/3} Lambda^b f ||
  double dx23_lambda_b = 0.0;        // || |D_x|^{2/3} Lambda^b f ||
  double dx43_lambda_b = 0.0;        // || |D_x|^{4/3} Lambda^b f ||
  double dy_dx13_lambda_b = 0.0;     // || D_y |D_x|^{1/3} Lambda^b f ||
  double neg_lap_half_neq = 0.0;     // || (-Delta)^{-1/2} Lambda^b f_neq ||
  double neg_lap_half_dx13_neq = 0.0;// || (-Delta)^{-1/2} |D_x|^{1/3} Lambda^b f_neq ||
  double sqrtM_lambda_b = 0.0;       // || sqrt(M) Lambda^b f ||
  double dy_sqrtM_lambda_b = 0.0;    // || D_y sqrt(M) Lambda^b f ||
  double dx_sqrtM_lambda_b = 0.0;    // || D_x sqrt(M) Lambda^b f ||
  double commutator_pairing = 0.0;   // < (k d_xi M) Lambda^b f, Lambda^b f >

  static constexpr std::size_t count = 13;
  std::array<double, count> values() const;
  static const std::array<std::string_view, count>& names();
};

/// One report: norms of omega and theta at time t, plus running time
/// integrals (trapezoid rule at report cadence) of every squared norm; the
/// commutator pairing, already quadratic, is integrated as is.
struct EnergyReport {
  double t = 0.0;
  NormBundle omega;
  NormBundle theta;
  NormBundle omega_int_sq;  // int_0^t ||.||^2 dt, entry by entry
  NormBundle theta_int_sq;
};

/// Norms of a single field; nu enters only through M.
NormBundle field_norms(const SpectralField& f, double b, double nu);

EnergyReport energy_report(const SpectralField& omega, const SpectralField& theta,
                           const PhysicsParams& params);

/// Adds the trapezoid contribution between prev and next into next's
/// integral bundles (next.*_int_sq start as prev's values).
void accumulate_time_integrals(const EnergyReport& prev, EnergyReport& next);

/// Aggregate left-hand side of the linear a-priori bound:
///   ||Lambda w||_{Linf_t} + nu^{1/2}||D_y Lambda w||_{L2_t} + sigma nu^{1/2}||D_x Lambda w||_{L2_t}
///   + nu^{1/6}|| |D_x|^{1/3} Lambda w ||_{L2_t}
///   + (nu mu)^{-1/6} ( || |D_x|^{1/3} Lambda th ||_{Linf_t} + mu^{1/2} ||D_y |D_x|^{1/3} Lambda th||_{L2_t}
///                      + sigma mu^{1/2} || |D_x|^{4/3} Lambda th ||_{L2_t}
///                      + mu^{1/6} || |D_x|^{2/3} Lambda th ||_{L2_t} )
double linear_bundle_lhs(std::span<const EnergyReport> series, const PhysicsParams& p);
/// ||omega0||_{H^b} + (nu mu)^{-1/6} || |D_x|^{1/3} theta0 ||_{H^b}
double linear_bundle_rhs(const EnergyReport& initial, const PhysicsParams& p);

/// e-fold statistics of one decaying series.
struct DecayFit {
  int k = 0;
  double nu = 0.0;
  double t_efold = 0.0;      // first time the series drops below e^{-1} * initial
  double fit_quality = 0.0;  // max relative rise above the running minimum before t_efold (0 = monotone)
  bool valid = false;
};

/// Linear interpolation in log-amplitude between the samples bracketing the
/// first e^{-1} crossing. Invalid (valid = false) when no crossing occurs.
/// Error(precondition) if the series is empty, sizes differ, or values[0] <= 0.
DecayFit fit_efold(std::span<const double> times, std::span<const double> values, int k = 0,
                   double nu = 0.0);

struct ScalingFit {
  double p_nu = 0.0;  // t_efold ~ nu^{-p_nu}
  double q_k = 0.0;   // t_efold ~ k^{-q_k}
  double c0 = 0.0;    // log prefactor
  double r2 = 0.0;
};

/// Least squares log t = c0 - p_nu log nu - q_k log k over the valid fits.
/// Error(config) with fewer than 3 distinct nu or 3 distinct k values, or a
/// rank-deficient design.
ScalingFit scaling_regression(std::span<const DecayFit> fits);

/// Per-row L2_y norms ||f_k||_{L2_y} for k = -kmax..kmax (x-average
/// normalisation of the row, i.e. sqrt(ly * sum_j |c(k,j)|^2)).
std::vector<double> mode_norms(const SpectralField& f);

// --- CSV schemas -----------------------------------------------------------

/// Column list of the EnergyReport time series.
std::vector<std::string> energy_csv_columns();
std::string energy_csv_row(const EnergyReport& r);
std::string energy_csv(std::span<const EnergyReport> series);

std::vector<std::string> decay_csv_columns();
std::string decay_csv(std::span<const DecayFit> fits);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace cbsq
