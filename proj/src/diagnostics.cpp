#include "cbsq/diagnostics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "cbsq/errors.hpp"
#include "cbsq/multiplier.hpp"

namespace cbsq {

std::array<double, NormBundle::count> NormBundle::values() const {
  return {lambda_b_l2,      dy_lambda_b,          dx_lambda_b,         dx13_lambda_b,
          dx23_lambda_b,    dx43_lambda_b,        dy_dx13_lambda_b,    neg_lap_half_neq,
          neg_lap_half_dx13_neq, sqrtM_lambda_b,  dy_sqrtM_lambda_b,   dx_sqrtM_lambda_b,
          commutator_pairing};
}

const std::array<std::string_view, NormBundle::count>& NormBundle::names() {
  static const std::array<std::string_view, count> n = {
      "lambda_b_l2",      "dy_lambda_b",           "dx_lambda_b",       "dx13_lambda_b",
      "dx23_lambda_b",    "dx43_lambda_b",         "dy_dx13_lambda_b",  "neg_lap_half_neq",
      "neg_lap_half_dx13_neq", "sqrtM_lambda_b",   "dy_sqrtM_lambda_b", "dx_sqrtM_lambda_b",
      "commutator_pairing"};
  return n;
}

namespace {

NormBundle from_values(const std::array<double, NormBundle::count>& v) {
  NormBundle b;
  b.lambda_b_l2 = v[0];
  b.dy_lambda_b = v[1];
  b.dx_lambda_b = v[2];
  b.dx13_lambda_b = v[3];
  b.dx23_lambda_b = v[4];
  b.dx43_lambda_b = v[5];
  b.dy_dx13_lambda_b = v[6];
  b.neg_lap_half_neq = v[7];
  b.neg_lap_half_dx13_neq = v[8];
  b.sqrtM_lambda_b = v[9];
  b.dy_sqrtM_lambda_b = v[10];
  b.dx_sqrtM_lambda_b = v[11];
  b.commutator_pairing = v[12];
  return b;
}

}  // namespace

NormBundle field_norms(const SpectralField& f, double b, double nu) {
  const auto& lat = f.lattice();
  const double t = f.time();
  const bool sheared = f.frame() == Frame::sheared;
  std::array<double, NormBundle::count> s{};
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    const double kk = double(k) * k;
    const double ak = std::abs(double(k));
    const double k13 = std::cbrt(ak), k23 = k13 * k13, k43 = ak * k13;
    for (int j = -lat.jmax; j <= lat.jmax; ++j) {
      const double c2 = std::norm(f(k, j));
      if (c2 == 0.0) continue;
      const double eta = sheared ? lat.eta(j) : lat.eta(j) + k * t;
      const double xi = sheared ? lat.eta(j) - k * t : lat.eta(j);
      const double lam = std::pow(1.0 + kk + eta * eta, b) * c2;  // |Lambda^b c|^2
      const double xx = xi * xi;
      const double m = multiplier::m_symbol(k, xi, nu);
      s[0] += lam;
      s[1] += xx * lam;
      s[2] += kk * lam;
      s[3] += k23 * lam;
      s[4] += k43 * lam;
      s[5] += k43 * k43 * lam;
      s[6] += xx * k23 * lam;
      if (k != 0) {
        const double inv = 1.0 / (kk + xx);
        s[7] += inv * lam;
        s[8] += inv * k23 * lam;
        s[12] += multiplier::k_dxi_m(k, xi, nu) * lam;
      }
      s[9] += m * lam;
      s[10] += xx * m * lam;
      s[11] += kk * m * lam;
    }
  }
  const double cm = lat.cell_measure();
  std::array<double, NormBundle::count> v{};
  for (std::size_t i = 0; i + 1 < NormBundle::count; ++i) v[i] = std::sqrt(s[i] * cm);
  v[12] = s[12] * cm;
  return from_values(v);
}

EnergyReport energy_report(const SpectralField& omega, const SpectralField& theta,
                           const PhysicsParams& params) {
  require_compatible(omega, theta, "energy_report");
  EnergyReport r;
  r.t = omega.time();
  r.omega = field_norms(omega, params.b, params.nu);
  r.theta = field_norms(theta, params.b, params.mu);
  return r;
}

void accumulate_time_integrals(const EnergyReport& prev, EnergyReport& next) {
  const double h = next.t - prev.t;
  auto acc = [h](const NormBundle& p, const NormBundle& n, const NormBundle& pint) {
    const auto pv = p.values(), nv = n.values(), iv = pint.values();
    std::array<double, NormBundle::count> out{};
    for (std::size_t i = 0; i < NormBundle::count; ++i) {
      const bool quadratic = i + 1 == NormBundle::count;
      const double a = quadratic ? pv[i] : pv[i] * pv[i];
      const double b = quadratic ? nv[i] : nv[i] * nv[i];
      out[i] = iv[i] + 0.5 * h * (a + b);
    }
    return from_values(out);
  };
  next.omega_int_sq = acc(prev.omega, next.omega, prev.omega_int_sq);
  next.theta_int_sq = acc(prev.theta, next.theta, prev.theta_int_sq);
}

double linear_bundle_lhs(std::span<const EnergyReport> series, const PhysicsParams& p) {
  if (series.empty()) throw Error(ErrorKind::precondition, "linear_bundle_lhs: empty series");
  double w_sup = 0.0, th_sup = 0.0;
  for (const auto& r : series) {
    w_sup = std::max(w_sup, r.omega.lambda_b_l2);
    th_sup = std::max(th_sup, r.theta.dx13_lambda_b);
  }
  const auto& wi = series.back().omega_int_sq;
  const auto& ti = series.back().theta_int_sq;
  const double sn = std::sqrt(p.nu), sm = std::sqrt(p.mu);
  const double lhs_w = w_sup + sn * std::sqrt(wi.dy_lambda_b) + p.sigma * sn * std::sqrt(wi.dx_lambda_b) +
                       std::pow(p.nu, 1.0 / 6.0) * std::sqrt(wi.dx13_lambda_b);
  const double lhs_t = th_sup + sm * std::sqrt(ti.dy_dx13_lambda_b) + p.sigma * sm * std::sqrt(ti.dx43_lambda_b) +
                       std::pow(p.mu, 1.0 / 6.0) * std::sqrt(ti.dx23_lambda_b);
  return lhs_w + std::pow(p.nu * p.mu, -1.0 / 6.0) * lhs_t;
}

double linear_bundle_rhs(const EnergyReport& initial, const PhysicsParams& p) {
  return initial.omega.lambda_b_l2 + std::pow(p.nu * p.mu, -1.0 / 6.0) * initial.theta.dx13_lambda_b;
}

DecayFit fit_efold(std::span<const double> times, std::span<const double> values, int k, double nu) {
  if (times.empty() || times.size() != values.size())
    throw Error(ErrorKind::precondition, "fit_efold: series empty or sizes differ");
  if (!(values[0] > 0.0)) throw Error(ErrorKind::precondition, "fit_efold: series must start positive");
  DecayFit fit;
  fit.k = k;
  fit.nu = nu;
  const double level = values[0] * std::exp(-1.0);
  double running_min = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < level) {
      const double la = std::log(values[i - 1]), lb = std::log(std::max(values[i], std::numeric_limits<double>::min()));
      const double ll = std::log(level);
      const double frac = (la - ll) / (la - lb);
      fit.t_efold = times[i - 1] + frac * (times[i] - times[i - 1]);
      fit.valid = fit.t_efold > 0.0;
      return fit;
    }
    if (values[i] > running_min) fit.fit_quality = std::max(fit.fit_quality, (values[i] - running_min) / running_min);
    running_min = std::min(running_min, values[i]);
  }
  return fit;
}

ScalingFit scaling_regression(std::span<const DecayFit> fits) {
  std::vector<const DecayFit*> ok;
  std::set<double> nus;
  std::set<int> ks;
  for (const auto& f : fits)
    if (f.valid && f.t_efold > 0.0 && f.nu > 0.0 && f.k != 0) {
      ok.push_back(&f);
      nus.insert(f.nu);
      ks.insert(std::abs(f.k));
    }
  if (nus.size() < 3 || ks.size() < 3)
    throw Error(ErrorKind::config, "scaling_regression: need at least 3 distinct nu and 3 distinct k values");
  const Eigen::Index n = static_cast<Eigen::Index>(ok.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = -std::log(ok[i]->nu);
    a(i, 2) = -std::log(std::abs(double(ok[i]->k)));
    y(i) = std::log(ok[i]->t_efold);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw Error(ErrorKind::config, "scaling_regression: rank-deficient design");
  const Eigen::VectorXd x = qr.solve(y);
  const Eigen::VectorXd res = y - a * x;
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = res.squaredNorm();
  ScalingFit out;
  out.c0 = x(0);
  out.p_nu = x(1);
  out.q_k = x(2);
  out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return out;
}

std::vector<double> mode_norms(const SpectralField& f) {
  const auto& lat = f.lattice();
  std::vector<double> out;
  out.reserve(lat.nk());
  for (int k = -lat.kmax; k <= lat.kmax; ++k) {
    double s = 0.0;
    for (int j = -lat.jmax; j <= lat.jmax; ++j) s += std::norm(f(k, j));
    out.push_back(std::sqrt(lat.ly * s));
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::vector<std::string> energy_csv_columns() {
  std::vector<std::string> cols{"t"};
  for (const char* prefix : {"omega_", "theta_", "omega_int_sq_", "theta_int_sq_"})
    for (auto n : NormBundle::names()) cols.push_back(prefix + std::string(n));
  return cols;
}

std::string energy_csv_row(const EnergyReport& r) {
  std::string row = format_double(r.t);
  for (const NormBundle* b : {&r.omega, &r.theta, &r.omega_int_sq, &r.theta_int_sq})
    for (double v : b->values()) {
      row += ',';
      row += format_double(v);
    }
  return row;
}

namespace {
std::string join(const std::vector<std::string>& cols) {
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) s += ',';
    s += cols[i];
  }
  return s;
}
}  // namespace

std::string energy_csv(std::span<const EnergyReport> series) {
  std::string out = join(energy_csv_columns()) + '\n';
  for (const auto& r : series) out += energy_csv_row(r) + '\n';
  return out;
}

std::vector<std::string> decay_csv_columns() { return {"k", "nu", "t_efold", "fit_quality", "valid"}; }

std::string decay_csv(std::span<const DecayFit> fits) {
  std::string out = join(decay_csv_columns()) + '\n';
  for (const auto& f : fits) {
    out += std::to_string(f.k) + ',' + format_double(f.nu) + ',' + format_double(f.t_efold) + ',' +
           format_double(f.fit_quality) + ',' + (f.valid ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace cbsq
