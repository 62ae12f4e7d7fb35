#pragma once

#include <cstddef>

#include <json.hpp>

#include "xaieval/attribution/methods.hpp"
#include "xaieval/attribution/ranking.hpp"
#include "xaieval/data/dataset.hpp"

namespace xaieval::attribution {

// Where IG baselines and DeepLift references come from.
enum class ReferencePolicy { Zeros, TrainMean };

const char* to_string(ReferencePolicy policy);
ReferencePolicy reference_policy_from_string(const std::string& name);

// Method settings that are independent of the feature count. resolve()
// turns them into concrete parameters for one training set.
struct AttributionSettings {
  std::size_t ig_steps = 128;
  ReferencePolicy ig_baseline = ReferencePolicy::Zeros;
  double lrp_epsilon = 1e-6;
  ReferencePolicy deeplift_reference = ReferencePolicy::TrainMean;
  TargetPolicy target = TargetPolicy::Predicted;
  Aggregation aggregation = Aggregation::Absolute;
  // Test rows explained for a global ranking (all rows when fewer).
  std::size_t global_samples = 500;
  Execution execution = Execution::Parallel;

  void validate() const;
  AttributionParams resolve(const data::Dataset& train) const;
  GlobalOptions global_options() const;

  nlohmann::json to_json() const;
  static AttributionSettings from_json(const nlohmann::json& j);
};

}  // namespace xaieval::attribution
