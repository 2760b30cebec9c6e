#include "cbsq/sweep.hpp"

#include <cmath>
#include <exception>

#include "cbsq/errors.hpp"
#include "splitmix.hpp"

namespace cbsq {

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::marginal: return "marginal";
    case Stability::escaped: return "escaped";
  }
  return "unknown";
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t index) {
  return detail::splitmix64(seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1));
}

Stability classify(double ratio, double growth_factor) {
  if (!(ratio <= growth_factor)) return Stability::escaped;
  if (ratio > 0.9 * growth_factor) return Stability::marginal;
  return Stability::stable;
}

namespace {

ThresholdCell run_cell(const SweepSetup& setup, double nu, double beta, double horizon, std::uint64_t seed) {
  ThresholdCell cell;
  cell.nu = nu;
  cell.beta_test = beta;
  cell.seed = seed;
  cell.amplitude = setup.epsilon * std::pow(nu, beta);
  cell.t_end = horizon * std::pow(nu, -1.0 / 3.0);

  PhysicsParams p = setup.base;
  p.nu = p.mu = nu;
  p.beta = beta;
  p.alpha = beta + 2.0 / 3.0;
  p.delta = beta + 1.0 / 3.0;
  InitialDataSpec spec = threshold_data_spec(p, setup.epsilon, seed);
  if (setup.theta_zero) {
    spec.theta_hb = 0.0;
    spec.theta_dx13.reset();
  }
  const SimState init = make_initial_data(setup.lattice, p, spec);
  const double theta0 = spec.theta_hb;

  double sup_w = 0.0, sup_t = 0.0;
  SimulateOptions opts;
  opts.on_report = [&](const SimState&, const EnergyReport& r) {
    sup_w = std::max(sup_w, r.omega.lambda_b_l2);
    sup_t = std::max(sup_t, r.theta.lambda_b_l2);
  };
  try {
    simulate(init, setup.stepper, cell.t_end, setup.report_every, opts);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::nan_abort && e.kind() != ErrorKind::confinement) throw;
    cell.classification = Stability::escaped;
    cell.reason = std::string(to_string(e.kind())) + ": " + e.what();
  }
  cell.witnessed_ratio = cell.amplitude > 0.0 ? sup_w / cell.amplitude : 0.0;
  cell.theta_ratio = theta0 > 0.0 ? sup_t / theta0 : 0.0;
  if (cell.reason.empty()) cell.classification = classify(cell.witnessed_ratio, setup.growth_factor);
  return cell;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + '"';
}

}  // namespace

ThresholdTable threshold_sweep(const SweepSetup& setup, std::span<const double> beta_grid,
                               std::span<const double> nu_grid, double horizon_efolds, std::uint64_t seed,
                               int jobs) {
  if (beta_grid.empty() || nu_grid.empty()) throw Error(ErrorKind::config, "threshold_sweep: empty grid");
  if (!(horizon_efolds >= 1.0)) throw Error(ErrorKind::config, "threshold_sweep: horizon_efolds must be >= 1");
  for (double nu : nu_grid)
    if (!(nu > 0.0)) throw Error(ErrorKind::config, "threshold_sweep: nu values must be positive");
  ThresholdTable table;
  table.growth_factor = setup.growth_factor;
  table.epsilon = setup.epsilon;
  const std::size_t nb = beta_grid.size();
  const std::size_t n = nu_grid.size() * nb;
  table.cells.resize(n);
  std::vector<std::exception_ptr> errors(n);
  const long ln = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs < 1 ? 1 : jobs)
  for (long i = 0; i < ln; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      table.cells[idx] = run_cell(setup, nu_grid[idx / nb], beta_grid[idx % nb], horizon_efolds, cell_seed(seed, idx));
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return table;
}

std::vector<std::string> threshold_csv_columns() {
  return {"nu", "beta_test", "amplitude", "witnessed_ratio", "theta_ratio", "t_end",
          "seed", "growth_factor", "classification", "reason"};
}

std::string threshold_csv(const ThresholdTable& table) {
  std::string out;
  const auto cols = threshold_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& c : table.cells) {
    out += format_double(c.nu) + ',' + format_double(c.beta_test) + ',' + format_double(c.amplitude) + ',' +
           format_double(c.witnessed_ratio) + ',' + format_double(c.theta_ratio) + ',' + format_double(c.t_end) +
           ',' + std::to_string(c.seed) + ',' + format_double(table.growth_factor) + ',' +
           std::string(to_string(c.classification)) + ',' + csv_quote(c.reason) + '\n';
  }
  return out;
}

}  // namespace cbsq
