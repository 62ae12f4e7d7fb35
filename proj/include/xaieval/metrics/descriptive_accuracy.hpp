#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/ranking.hpp"
#include "xaieval/data/dataset.hpp"
#include "xaieval/nn/train.hpp"

namespace xaieval::metrics {

// Retrain drops the top-k columns and fits a fresh model; Mask zeroes them
// in the test split and reuses the k=0 model (fast, not the reference mode).
enum class RemovalMode { Retrain, Mask };

const char* to_string(RemovalMode mode);
RemovalMode removal_mode_from_string(const std::string& name);

// {0, 5, 10, 25, 50, 70} with values >= d replaced by d - 1, deduplicated.
std::vector<std::size_t> default_k_list(std::size_t d);

struct DescriptiveAccuracyConfig {
  std::vector<std::size_t> k_list;  // empty: default_k_list(d)
  RemovalMode mode = RemovalMode::Retrain;
  // Retrain every k concurrently; results match the sequential run.
  bool parallel = false;
};

struct AccuracyPoint {
  std::size_t k = 0;
  double accuracy = 0.0;
  std::vector<std::string> removed;
};

struct DescriptiveAccuracyResult {
  RemovalMode mode = RemovalMode::Retrain;
  std::vector<std::string> ranking;  // full order used for removal
  std::vector<AccuracyPoint> points;
  double majority_rate = 0.0;

  nlohmann::json to_json() const;
};

// `ranking` comes from the k=0 model; `base` is that model (trained with
// `cfg` on all features). Every point is scored on the same `test` split.
// Throws InvalidArgument when a k >= d or the list does not start at 0.
DescriptiveAccuracyResult descriptive_accuracy(const data::Dataset& train, const data::Dataset& test,
                                               const nn::Architecture& arch,
                                               const nn::TrainConfig& cfg,
                                               const nn::DenseNetwork& base,
                                               const attribution::FeatureRanking& ranking,
                                               const DescriptiveAccuracyConfig& config);

}  // namespace xaieval::metrics
