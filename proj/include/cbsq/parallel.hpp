#pragma once

namespace cbsq::parallel {

/// Threads available to intra-run kernels: omp_get_max_threads(), capped by
/// the CBSQ_THREADS environment variable when set to a positive integer.
int max_threads();

/// Overrides the cap (n <= 0 restores the environment/default behaviour).
void set_thread_cap(int n);

}  // namespace cbsq::parallel
