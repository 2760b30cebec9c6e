#pragma once

#include <string>
#include <vector>

namespace cbsq {

/// Physical and threshold parameters of a run.
///
/// sigma = 0 selects vertical-only dissipation nu*d_yy, sigma = 1 the full
/// Laplacian. beta/alpha/delta are the amplitude exponents of the initial data
/// (||omega0||_{H^b} ~ eps nu^beta, ||theta0||_{H^b} ~ eps nu^alpha,
/// || |D_x|^{1/3} theta0 ||_{H^b} ~ eps nu^delta).
struct PhysicsParams {
  double nu = 1e-3;
  double mu = 1e-3;
  int sigma = 0;
  double b = 1.5;
  double beta = 2.0 / 3.0;
  double alpha = 4.0 / 3.0;
  double delta = 1.0;

  bool operator==(const PhysicsParams&) const = default;
};

/// Index conditions of the nonlinear stability regime selected by sigma:
///   sigma = 0: b > 4/3, beta >= 2/3, delta >= beta + 1/3, alpha >= delta - beta + 2/3
///   sigma = 1: b > 1,   beta >= 1/2, delta >= beta + 1/3, alpha >= delta - beta + 2/3
/// Returns one human-readable line per violated condition (empty when valid).
std::vector<std::string> index_condition_violations(const PhysicsParams& p);

/// Basic sanity: nu, mu >= 0, sigma in {0,1}, all values finite.
/// Throws ConfigError.
void validate_physics(const PhysicsParams& p);

}  // namespace cbsq
