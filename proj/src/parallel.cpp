#include "cbsq/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>

namespace cbsq::parallel {

namespace {
std::atomic<int> g_cap{0};

int env_cap() {
  static const int cap = [] {
    const char* s = std::getenv("CBSQ_THREADS");
    if (s == nullptr) return 0;
    try {
      return std::max(0, std::stoi(s));
    } catch (...) {
      return 0;
    }
  }();
  return cap;
}
}  // namespace

int max_threads() {
  int n = omp_get_max_threads();
  const int explicit_cap = g_cap.load();
  const int cap = explicit_cap > 0 ? explicit_cap : env_cap();
  if (cap > 0) n = std::min(n, cap);
  return std::max(1, n);
}

void set_thread_cap(int n) { g_cap.store(std::max(0, n)); }

}  // namespace cbsq::parallel
