#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbsq/solver.hpp"

namespace cbsq {

enum class Stability { stable, marginal, escaped };
std::string_view to_string(Stability s);

struct ThresholdCell {
  double nu = 0.0;
  double beta_test = 0.0;
  double amplitude = 0.0;        // eps nu^beta_test
  double witnessed_ratio = 0.0;  // sup_t ||Lambda_t^b omega|| / amplitude (0 when amplitude = 0)
  double theta_ratio = 0.0;      // sup_t ||Lambda_t^b theta|| / ||theta0||_{H^b} target (0 if none)
  double t_end = 0.0;
  std::uint64_t seed = 0;
  Stability classification = Stability::stable;
  std::string reason;            // abort message for escaped-by-abort cells
};

struct ThresholdTable {
  double growth_factor = 4.0;
  double epsilon = 0.0;
  std::vector<ThresholdCell> cells;  // nu-major, then beta_test
};

struct SweepSetup {
  FrequencyLattice lattice;
  PhysicsParams base;          // sigma, b, mu/nu ratio ignored (nu = mu per cell)
  StepperConfig stepper;
  double epsilon = 0.05;
  double growth_factor = 4.0;  // stability guard G
  double report_every = 0.25;
  bool theta_zero = false;     // Navier-Stokes reduction
};

/// Counter-based per-cell seed: splitmix64(seed + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t cell_seed(std::uint64_t seed, std::size_t index);

/// Classification of one sup-ratio r against the guard G:
/// r <= 0.9 G stable, 0.9 G < r <= G marginal, r > G escaped.
Stability classify(double ratio, double growth_factor);

/// For each (nu, beta_test): initial data with ||omega0||_{H^b} = eps nu^beta_test,
/// theta targets alpha = beta_test + 2/3 (H^b) and delta = beta_test + 1/3
/// (|D_x|^{1/3} H^b, as an upper bound); simulate to horizon_efolds nu^{-1/3}.
/// Solver aborts become escaped cells with the abort message as reason.
/// Cells run in parallel over up to `jobs` threads; the table does not depend on jobs.
ThresholdTable threshold_sweep(const SweepSetup& setup, std::span<const double> beta_grid,
                               std::span<const double> nu_grid, double horizon_efolds,
                               std::uint64_t seed, int jobs = 1);

std::vector<std::string> threshold_csv_columns();
std::string threshold_csv(const ThresholdTable& table);

}  // namespace cbsq
