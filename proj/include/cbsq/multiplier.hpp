#pragma once

#include <string>
#include <vector>

#include "cbsq/lattice.hpp"

namespace cbsq::multiplier {

/// Cut-off profile: phi' = 1/4 on |s| <= 1, (1/4) cos^2(pi (|s|-1)/4) on
/// 1 < |s| <= 3, zero beyond; phi(-3) = 0, phi(0) = 1/2, phi(3) = 1. C^1.
double phi(double s);
double phi_prime(double s);

/// M1(k,xi) = phi(nu^{1/3} |k|^{-1/3} sgn(k) xi), zero at k = 0.
double m1_symbol(int k, double xi, double nu);
/// M2(k,xi) = (arctan(xi/k) + pi/2) / k^2, zero at k = 0.
double m2_symbol(int k, double xi);
/// M = 1 + M1 + M2, with 1 <= M <= 2 + pi.
double m_symbol(int k, double xi, double nu);

/// nu^{1/3} |k|^{2/3}: the enhanced-dissipation rate scale.
double enhanced_rate(int k, double nu);

/// k d_xi M1 = nu^{1/3}|k|^{2/3} phi'(nu^{1/3}|k|^{-1/3} sgn(k) xi).
double k_dxi_m1(int k, double xi, double nu);
/// k d_xi M = k d_xi M1 + 1/(k^2 + xi^2). Error(domain) at k = 0.
double k_dxi_m(int k, double xi, double nu);
/// Same as k_dxi_m but returns 0 at k = 0 (M is constant in xi there).
double k_dxi_m_or_zero(int k, double xi, double nu);

/// M_k = phi(mu^{1/3}|k|^{-1/3} sgn(k) xi) for k != 0, M_0 = 0.
double m_vertical_symbol(int k, double xi, double mu);

/// Symbol values sampled on a lattice at xi = eta_j - k t.
struct MultiplierTable {
  FrequencyLattice lattice;
  double nu = 0.0;
  double t = 0.0;
  std::vector<double> m1, m2, m, mk, k_dxi_m;  // lattice layout; k_dxi_m is 0 on k = 0

  double xi(int k, int j) const { return lattice.eta(j) - k * t; }
};

MultiplierTable build_table(const FrequencyLattice& lattice, double nu, double t = 0.0);

struct SlackRow {
  int k = 0;
  bool applicable = true;          // false for k = 0
  double min_slack_m1 = 0.0;       // min over xi of nu xi^2 + k d_xi M1 - 1/4 nu^{1/3}|k|^{2/3}
  double min_slack_full = 0.0;     // min of 2 nu xi^2 M + k d_xi M - (nu xi^2 + 1/4 nu^{1/3}|k|^{2/3} + 1/(xi^2+k^2))
  double xi_at_min_m1 = 0.0;
  double xi_at_min_full = 0.0;
};

struct Violation {
  std::string what;
  int k = 0;
  double xi = 0.0;
  double value = 0.0;
};

struct EnhancedBoundReport {
  double nu = 0.0;
  std::vector<SlackRow> rows;      // one per k in -kmax..kmax
  std::vector<Violation> violations;
  double m_min = 0.0, m_max = 0.0; // extremes of M over the table
  bool pass() const { return violations.empty(); }
};

/// Scans every lattice point: 1 <= M <= 2+pi, and both enhanced-dissipation
/// lower bounds at every k != 0. Never throws; failures are listed.
EnhancedBoundReport verify_enhanced_bound(const MultiplierTable& table);

}  // namespace cbsq::multiplier
