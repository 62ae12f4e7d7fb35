#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/batch.hpp"
#include "xaieval/attribution/settings.hpp"
#include "xaieval/data/dataset.hpp"

namespace xaieval::metrics {

struct EfficiencyConfig {
  std::vector<std::size_t> counts = {1, 100, 500, 2500, 10000};
  std::size_t repeats = 3;
};

struct EfficiencyRow {
  std::size_t samples = 0;
  std::string label;  // "1 (Local)" for the single-sample row
  bool with_replacement = false;
  std::vector<double> seconds;
  double median = 0.0;
};

struct EfficiencyResult {
  std::vector<EfficiencyRow> rows;
  std::size_t repeats = 0;
  Execution execution = Execution::Parallel;

  // Deterministic part: counts, labels and sampling flags.
  nlohmann::json to_json() const;
  // Wall-clock part: per-repeat and median seconds, thread count.
  nlohmann::json measurements() const;
};

double median(std::vector<double> values);

// Times explain_batch on `count` test rows per entry; targets are predicted
// beforehand, so the timed region holds the attribution call only. Counts
// above the test size are sampled with replacement and flagged.
EfficiencyResult efficiency(const nn::DenseNetwork& net, const data::Dataset& test,
                            attribution::Method method,
                            const attribution::AttributionParams& params,
                            const EfficiencyConfig& config, std::uint64_t seed,
                            Execution execution = Execution::Parallel);

}  // namespace xaieval::metrics
