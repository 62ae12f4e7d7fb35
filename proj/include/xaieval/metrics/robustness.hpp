#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/settings.hpp"
#include "xaieval/data/synth.hpp"
#include "xaieval/nn/train.hpp"

namespace xaieval::metrics {

struct RobustnessConfig {
  std::size_t trials = 100;
  std::size_t ranks = 3;
  data::RobustnessColumns columns;
};

// Percentages of trials where the feature at `rank` is the biased feature,
// the unrelated feature or anything else; they sum to 100.
struct RankShare {
  std::size_t rank = 0;
  double biased = 0.0;
  double unrelated = 0.0;
  double other = 0.0;
};

struct RobustnessModelResult {
  double test_accuracy = 0.0;
  std::vector<RankShare> shares;
  std::vector<std::vector<std::string>> trial_top;  // per trial, ranks 1..n
  double unrelated_in_top = 0.0;                    // % of trials with unrelated in ranks 1..n

  nlohmann::json to_json() const;
};

struct RobustnessResult {
  std::string biased_feature;
  std::string unrelated_feature;
  double threshold = 0.0;
  std::vector<std::size_t> trial_rows;
  RobustnessModelResult biased;
  RobustnessModelResult adversarial;
  data::UnrelatedColumn unrelated_mode = data::UnrelatedColumn::Random;

  nlohmann::json to_json() const;
};

const char* to_string(data::UnrelatedColumn mode);
data::UnrelatedColumn unrelated_mode_from_string(const std::string& name);

// Rebuilds labels from `biased_feature` over train and test together, fits
// the biased model (original features) and the adversarial model (plus the
// unrelated column), then explains `trials` test rows under both at their
// predicted class. Throws InvalidArgument if the feature is absent.
RobustnessResult robustness(const data::Dataset& train, const data::Dataset& test,
                            const nn::Architecture& arch, const nn::TrainConfig& cfg,
                            attribution::Method method,
                            const attribution::AttributionSettings& settings,
                            const std::string& biased_feature, const RobustnessConfig& config,
                            std::uint64_t seed);

}  // namespace xaieval::metrics
