#include "cbsq/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cbsq/errors.hpp"
#include "tabulate.hpp"

namespace cbsq::multiplier {

namespace {

constexpr double pi = std::numbers::pi;

double phi_nonneg(double s) {
  if (s <= 1.0) return 0.5 + 0.25 * s;
  if (s <= 3.0) {
    const double u = s - 1.0;
    return 0.75 + 0.25 * (0.5 * u + std::sin(0.5 * pi * u) / pi);
  }
  return 1.0;
}

double scaled_arg(int k, double xi, double nu) {
  const double ak = std::abs(double(k));
  const double sgn = k > 0 ? 1.0 : -1.0;
  return std::cbrt(nu) / std::cbrt(ak) * sgn * xi;
}

}  // namespace

double phi(double s) {
  if (std::isnan(s)) return s;
  return s >= 0.0 ? phi_nonneg(s) : 1.0 - phi_nonneg(-s);
}

double phi_prime(double s) {
  const double a = std::abs(s);
  if (a <= 1.0) return 0.25;
  if (a <= 3.0) {
    const double c = std::cos(0.25 * pi * (a - 1.0));
    return 0.25 * c * c;
  }
  return 0.0;
}

double m1_symbol(int k, double xi, double nu) {
  if (k == 0) return 0.0;
  return phi(scaled_arg(k, xi, nu));
}

double m2_symbol(int k, double xi) {
  if (k == 0) return 0.0;
  const double kk = double(k);
  return (std::atan(xi / kk) + 0.5 * pi) / (kk * kk);
}

double m_symbol(int k, double xi, double nu) { return 1.0 + m1_symbol(k, xi, nu) + m2_symbol(k, xi); }

double enhanced_rate(int k, double nu) {
  const double ak = std::abs(double(k));
  return std::cbrt(nu) * std::cbrt(ak * ak);
}

double k_dxi_m1(int k, double xi, double nu) {
  if (k == 0) return 0.0;
  return enhanced_rate(k, nu) * phi_prime(scaled_arg(k, xi, nu));
}

double k_dxi_m(int k, double xi, double nu) {
  if (k == 0) throw Error(ErrorKind::domain, "k_dxi_m: undefined at k = 0");
  return k_dxi_m1(k, xi, nu) + 1.0 / (double(k) * k + xi * xi);
}

double k_dxi_m_or_zero(int k, double xi, double nu) { return k == 0 ? 0.0 : k_dxi_m(k, xi, nu); }

double m_vertical_symbol(int k, double xi, double mu) { return k == 0 ? 0.0 : m1_symbol(k, xi, mu); }

MultiplierTable build_table(const FrequencyLattice& lattice, double nu, double t) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorKind::domain, "build_table: nu must be positive");
  MultiplierTable tab;
  tab.lattice = lattice;
  tab.nu = nu;
  tab.t = t;
  tab.m1 = detail::tabulate(lattice, [&](int k, int j) { return m1_symbol(k, tab.xi(k, j), nu); });
  tab.m2 = detail::tabulate(lattice, [&](int k, int j) { return m2_symbol(k, tab.xi(k, j)); });
  tab.m.resize(lattice.size());
  for (std::size_t i = 0; i < tab.m.size(); ++i) tab.m[i] = 1.0 + tab.m1[i] + tab.m2[i];
  tab.mk = detail::tabulate(lattice, [&](int k, int j) { return m_vertical_symbol(k, tab.xi(k, j), nu); });
  tab.k_dxi_m = detail::tabulate(lattice, [&](int k, int j) { return k_dxi_m_or_zero(k, tab.xi(k, j), nu); });
  return tab;
}

EnhancedBoundReport verify_enhanced_bound(const MultiplierTable& table) {
  const auto& lat = table.lattice;
  const double nu = table.nu;
  EnhancedBoundReport rep;
  rep.nu = nu;
  rep.m_min = std::numeric_limits<double>::infinity();
  rep.m_max = -std::numeric_limits<double>::infinity();
  const double m_upper = 2.0 + pi;

  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    SlackRow row;
    row.k = k;
    row.applicable = k != 0;
    row.min_slack_m1 = std::numeric_limits<double>::infinity();
    row.min_slack_full = std::numeric_limits<double>::infinity();
    const double q = enhanced_rate(k, nu);
    const double kk = double(k) * k;
    for (int j = -lat.jmax; j <= lat.jmax; ++j) {
      const double xi = table.xi(k, j);
      const double m = m_symbol(k, xi, nu);
      rep.m_min = std::min(rep.m_min, m);
      rep.m_max = std::max(rep.m_max, m);
      if (!(m >= 1.0) || !(m <= m_upper))
        rep.violations.push_back({"M outside [1, 2+pi]", k, xi, m});
      if (k == 0) continue;

      // Both sides are summed so the plateau terms cancel exactly in floating point.
      const double diss = nu * xi * xi;
      const double dphi = q * phi_prime(scaled_arg(k, xi, nu));
      const double lhs1 = diss + dphi;
      const double rhs1 = q / 4.0;
      const double inv = 1.0 / (kk + xi * xi);
      const double lhs2 = 2.0 * diss * m + (dphi + inv);
      const double rhs2 = diss + (q / 4.0 + inv);

      const double s1 = lhs1 - rhs1;
      const double s2 = lhs2 - rhs2;
      if (s1 < row.min_slack_m1) { row.min_slack_m1 = s1; row.xi_at_min_m1 = xi; }
      if (s2 < row.min_slack_full) { row.min_slack_full = s2; row.xi_at_min_full = xi; }
      if (!(lhs1 >= rhs1)) rep.violations.push_back({"M1 enhanced bound", k, xi, s1});
      if (!(lhs2 >= rhs2)) rep.violations.push_back({"full enhanced bound", k, xi, s2});
    }
    if (k == 0) { row.min_slack_m1 = 0.0; row.min_slack_full = 0.0; }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace cbsq::multiplier
