#pragma once

#include <exception>
#include <mutex>
#include <utility>

// Execution policy for the data-parallel kernels (sweep rows, DP stage
// cells). The serial path is the reference implementation; the parallel path
// must produce identical results and is compared against it in the tests and
// the benchmark tool.

namespace spinchain::par {

enum class Exec { serial, parallel };

// Run fn(i) for i in [0, n). Exceptions thrown by fn are captured and the
// first one is rethrown after the loop completes.
template <class Fn>
void for_each_index(int n, Exec exec, Fn&& fn) {
  if (exec == Exec::serial) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spinchain::par
