#include "cbsq/lattice.hpp"

#include <cmath>
#include <string>

#include "cbsq/errors.hpp"

namespace cbsq {

FrequencyLattice::FrequencyLattice(int kmax_, int jmax_, double ly_)
    : kmax(kmax_), jmax(jmax_), ly(ly_) {
  if (kmax < 1) throw ConfigError("kmax must be >= 1, got " + std::to_string(kmax));
  if (jmax < 1) throw ConfigError("jmax must be >= 1, got " + std::to_string(jmax));
  if (!(ly > 0.0) || !std::isfinite(ly)) throw ConfigError("ly must be a positive finite length");
}

}  // namespace cbsq
