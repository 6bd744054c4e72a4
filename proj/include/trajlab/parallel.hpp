#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#ifdef TRAJLAB_USE_OPENMP
#include <omp.h>
#endif

namespace trajlab {

inline int available_threads() {
#ifdef TRAJLAB_USE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Serial reference loop. Parallel results are checked against this.
template <typename Body>
void serial_for(std::size_t n, Body&& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Bodies must write
/// only to slot i of preallocated outputs; the result is then independent of
/// the thread count. The exception of the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, int jobs, Body&& body) {
#ifdef TRAJLAB_USE_OPENMP
  if (jobs > 1 && n > 1) {
    std::vector<std::exception_ptr> errors(n);
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    return;
  }
#endif
  (void)jobs;
  serial_for(n, body);
}

/// Maps body over [0, n) into a vector, in index order.
template <typename T, typename Body>
std::vector<T> parallel_map(std::size_t n, int jobs, Body&& body) {
  std::vector<T> out(n);
  parallel_for(n, jobs, [&](std::size_t i) { out[i] = body(i); });
  return out;
}

}  // namespace trajlab
