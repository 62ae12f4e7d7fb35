#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/settings.hpp"
#include "xaieval/data/synth.hpp"
#include "xaieval/metrics/completeness.hpp"
#include "xaieval/metrics/descriptive_accuracy.hpp"
#include "xaieval/metrics/efficiency.hpp"
#include "xaieval/metrics/robustness.hpp"
#include "xaieval/metrics/stability.hpp"
#include "xaieval/nn/train.hpp"

namespace xaieval::experiment {

// Either a synthetic recipe or a CSV file with its schema. Paths are stored
// absolute; the schema is kept inline so snapshots stay self-contained.
struct DatasetSource {
  std::optional<data::SyntheticSpec> synthetic;
  std::filesystem::path csv;
  std::filesystem::path test_csv;  // optional pre-made test split
  std::optional<data::DatasetSchema> schema;
  std::size_t max_rows = 0;  // 0: keep every row
  std::string id;            // defaults to the synthetic recipe or the CSV stem
};

struct MetricSettings {
  metrics::DescriptiveAccuracyConfig descriptive_accuracy;
  std::vector<double> sparsity_thresholds;  // empty: 0.0, 0.1, ..., 1.0
  metrics::EfficiencyConfig efficiency;
  metrics::StabilityConfig stability;
  metrics::RobustnessConfig robustness;
  std::string biased_feature;  // empty: consensus top-1 of the base model
  metrics::CompletenessConfig completeness;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  DatasetSource dataset;
  double split_ratio = 0.7;
  nn::Architecture architecture{{32, 16}};
  nn::TrainConfig train;  // train.seed defaults to seed
  std::vector<attribution::Method> methods = {attribution::Method::IG, attribution::Method::LRP,
                                              attribution::Method::DeepLift};
  attribution::AttributionSettings attribution;
  MetricSettings metrics;
  std::filesystem::path output_dir = "out";
  int threads = 0;  // 0: OpenMP default

  // Relative dataset paths resolve against base_dir. Throws ConfigError
  // with the offending key on unknown keys, bad values or missing files.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);
  // Every field, defaults included.
  nlohmann::json to_json() const;
  void validate() const;
};

}  // namespace xaieval::experiment
