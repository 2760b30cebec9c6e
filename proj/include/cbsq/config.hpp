#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cbsq/lattice.hpp"
#include "cbsq/linear_oracle.hpp"
#include "cbsq/params.hpp"

namespace cbsq {

enum class Mode { linear, simulate, sweep, verify_multiplier, fit_decay };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);  // Error(config) on unknown names

/// Everything a run needs. Defaults are the documented defaults table.
struct RunConfig {
  Mode mode = Mode::simulate;

  FrequencyLattice lattice{};        // kmax 32, jmax 256, ly 16 pi
  PhysicsParams physics{};           // nu = mu = 1e-3, sigma 0, b 1.5, beta 2/3, alpha 4/3, delta 1
  double epsilon = 0.05;

  Scheme scheme = Scheme::rk4;
  double dt_max = 0.05;
  double cfl_safety = 0.4;

  double t_end = 0.0;                // 0: derive from horizon_efolds * nu^{-1/3}
  double horizon_efolds = 4.0;

  std::string output_dir = "out";
  double report_every = 0.5;
  double checkpoint_every = 0.0;     // 0: only the final checkpoint
  std::uint64_t seed = 1;

  bool theta_zero = false;           // Navier-Stokes reduction (theta == 0)
  double quad_tol = 1e-10;           // linear mode
  double confinement_threshold = 1e-8;

  std::vector<double> beta_grid{0.5, 2.0 / 3.0, 0.9};  // sweep
  std::vector<double> nu_grid{1e-2, 3e-3};             // sweep, fit-decay, verify-multiplier
  double growth_factor = 4.0;                          // sweep
  std::vector<int> k_list{1, 2, 4, 8};                 // fit-decay
  std::string series_path;                             // fit-decay input CSV (empty: oracle scan)

  bool override_index_check = false;

  bool operator==(const RunConfig&) const = default;
};

/// Parses `key = value` entries separated by newlines, ',' or ';'. '#' starts
/// a comment. Lists are bracketed: `nu_grid = [1e-2, 3e-3]`. Omitted keys keep
/// their defaults. Throws ConfigError (with 1-based line/column) on unknown
/// keys, malformed values, or - for simulate/sweep modes and unless
/// override_index_check is set - violated index conditions or nu != mu.
/// `adjust` runs after parsing and before validation (CLI overrides).
RunConfig parse_config(std::string_view text, const std::function<void(RunConfig&)>& adjust = {});

/// Canonical document, one `key = value` per line; parse(emit(c)) == c.
std::string emit_config(const RunConfig& config);

/// Semantic checks shared by parse_config and the CLI after overrides.
void validate_config(const RunConfig& config);

/// t_end if set, else horizon_efolds * nu^{-1/3}.
double effective_t_end(const RunConfig& config);

}  // namespace cbsq
