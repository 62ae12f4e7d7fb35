#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace xaieval {

enum class Execution { Serial, Parallel };

const char* to_string(Execution exec);
Execution execution_from_string(const char* name);

// Calls fn(i) for i in [0, n). Parallel runs fan out with OpenMP; fn must
// only write to slot i of its outputs so both paths produce the same result.
// The first exception (by index) is rethrown after the loop.
template <typename Fn>
void for_each_index(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace xaieval
