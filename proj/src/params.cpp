#include "cbsq/params.hpp"

#include <cmath>
#include <sstream>

#include "cbsq/errors.hpp"

namespace cbsq {

namespace {
std::string fmt_num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}
}  // namespace

std::vector<std::string> index_condition_violations(const PhysicsParams& p) {
  std::vector<std::string> out;
  const bool vertical = p.sigma == 0;
  const double b_min = vertical ? 4.0 / 3.0 : 1.0;
  const double beta_min = vertical ? 2.0 / 3.0 : 0.5;
  const char* regime = vertical ? "vertical dissipation (sigma=0)" : "full dissipation (sigma=1)";
  // A few ulps of slack so that 2/3 typed as 0.6666666666666666 is accepted.
  constexpr double slack = 1e-12;
  if (!(p.b > b_min))
    out.push_back(std::string(regime) + " requires b > " + fmt_num(b_min) + ", got b = " + fmt_num(p.b));
  if (p.beta < beta_min - slack)
    out.push_back(std::string(regime) + " requires beta >= " + fmt_num(beta_min) + ", got beta = " +
                  fmt_num(p.beta));
  if (p.delta < p.beta + 1.0 / 3.0 - slack)
    out.push_back("requires delta >= beta + 1/3 = " + fmt_num(p.beta + 1.0 / 3.0) + ", got delta = " +
                  fmt_num(p.delta));
  if (p.alpha < p.delta - p.beta + 2.0 / 3.0 - slack)
    out.push_back("requires alpha >= delta - beta + 2/3 = " + fmt_num(p.delta - p.beta + 2.0 / 3.0) +
                  ", got alpha = " + fmt_num(p.alpha));
  return out;
}

void validate_physics(const PhysicsParams& p) {
  for (double v : {p.nu, p.mu, p.b, p.beta, p.alpha, p.delta})
    if (!std::isfinite(v)) throw ConfigError("physics parameters must be finite");
  if (p.nu < 0.0) throw ConfigError("nu must be >= 0");
  if (p.mu < 0.0) throw ConfigError("mu must be >= 0");
  if (p.sigma != 0 && p.sigma != 1) throw ConfigError("sigma must be 0 or 1");
}

}  // namespace cbsq
