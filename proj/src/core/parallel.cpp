#include "xaieval/core/parallel.hpp"

#include <string>

#include "xaieval/core/error.hpp"

namespace xaieval {

const char* to_string(Execution exec) { return exec == Execution::Serial ? "serial" : "parallel"; }

Execution execution_from_string(const char* name) {
  const std::string s(name);
  if (s == "serial") return Execution::Serial;
  if (s == "parallel") return Execution::Parallel;
  throw InvalidArgument("unknown execution mode '" + s + "' (expected serial or parallel)");
}

}  // namespace xaieval
