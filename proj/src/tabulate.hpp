#pragma once

#include <cstddef>
#include <vector>

#include "cbsq/lattice.hpp"
#include "cbsq/parallel.hpp"

namespace cbsq::detail {

/// out[index(k,j)] = fn(k, j) over the whole lattice, rows in parallel.
template <typename Fn>
std::vector<double> tabulate(const FrequencyLattice& lat, Fn&& fn) {
  std::vector<double> out(lat.size());
  const int K = lat.kmax, J = lat.jmax;
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads()) if (lat.size() > 4096)
  for (int k = -K; k <= K; ++k)
    for (int j = -J; j <= J; ++j) out[lat.index(k, j)] = fn(k, j);
  return out;
}

}  // namespace cbsq::detail
