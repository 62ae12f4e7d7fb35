#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/settings.hpp"
#include "xaieval/core/parallel.hpp"
#include "xaieval/data/dataset.hpp"

namespace xaieval::metrics {

struct PerturbationStep {
  std::string feature;
  std::size_t feature_index = 0;
  double value = 0.0;
  std::size_t new_class = 0;
};

struct PerturbationTrace {
  std::size_t instance_id = 0;
  std::size_t original_class = 0;
  std::vector<PerturbationStep> steps;  // one per re-prediction
  bool changed = false;
  std::size_t features_touched = 0;

  nlohmann::json to_json() const;
};

// Grid 0, step, 2*step, ..., 1. Throws InvalidArgument unless step divides 1.
std::vector<double> sweep_grid(double step);

// Explains x at its predicted class, then sweeps its top features (by
// |score|, ties by index) over the grid, skipping the original value when it
// is on the grid. Stops at the first class change; a feature that never
// flips is pinned at |original - 1| before the next one is swept.
PerturbationTrace completeness_local(const nn::DenseNetwork& net, std::span<const double> x,
                                     attribution::Method method,
                                     const attribution::AttributionParams& params,
                                     std::size_t max_features = 2, double step = 0.1,
                                     std::size_t instance_id = 0);

struct CompletenessConfig {
  std::size_t batch_per_class = 100;
  std::size_t max_features = 2;
  double step = 0.1;
  std::vector<std::string> classes;  // empty: every class present in the split
};

struct ClassCompleteness {
  std::string name;
  std::size_t available = 0;
  std::size_t total = 0;
  std::size_t changed = 0;
  double percent = 0.0;
};

struct CompletenessResult {
  CompletenessConfig config;
  std::vector<ClassCompleteness> per_class;
  // remaining[s]: fraction of all traced samples still unchanged after s
  // re-predictions (cumulative sweep steps). Non-increasing.
  std::vector<double> remaining;
  std::vector<PerturbationTrace> traces;

  nlohmann::json to_json() const;
};

// Throws DataError when a requested class has no rows in `test`.
CompletenessResult completeness_global(const nn::DenseNetwork& net, const data::Dataset& test,
                                       attribution::Method method,
                                       const attribution::AttributionParams& params,
                                       const CompletenessConfig& config, std::uint64_t seed,
                                       Execution execution = Execution::Parallel);

}  // namespace xaieval::metrics
