#pragma once

#include <atomic>
#include <exception>
#include <string>
#include <utility>

#include "tonelli/types.hpp"

namespace tonelli {

/// Execution policy for the embarrassingly parallel sweeps. Serial is the
/// reference implementation; OpenMP runs the identical per-index body across
/// threads. Results are written into per-index slots and reduced serially,
/// so the two policies produce bitwise-identical output.
enum class ExecPolicy { Serial, OpenMP };

template <typename F>
void for_each_index(ExecPolicy policy, long n, F&& body) {
  if (n <= 0) return;
  if (policy == ExecPolicy::Serial) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < n; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      body(i);
    } catch (...) {
      bool expected = false;
      if (failed.compare_exchange_strong(expected, true))
        first_error = std::current_exception();
    }
  }
  if (failed.load()) std::rethrow_exception(first_error);
}

inline ExecPolicy exec_policy_from_name(const std::string& name) {
  if (name == "serial") return ExecPolicy::Serial;
  if (name == "openmp") return ExecPolicy::OpenMP;
  throw Error("unknown execution policy '" + name + "' (expected serial or openmp)");
}

inline const char* exec_policy_name(ExecPolicy policy) {
  return policy == ExecPolicy::Serial ? "serial" : "openmp";
}

}  // namespace tonelli
