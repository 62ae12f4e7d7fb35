#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/settings.hpp"
#include "xaieval/data/dataset.hpp"
#include "xaieval/nn/train.hpp"

namespace xaieval::metrics {

enum class StabilityScope { Local, Global };
// Fixed repeats the identical run; Resample draws a fresh attribution batch
// per run; Retrain also fits a fresh model per run.
enum class StabilityMode { Fixed, Resample, Retrain };

const char* to_string(StabilityScope scope);
const char* to_string(StabilityMode mode);
StabilityScope stability_scope_from_string(const std::string& name);
StabilityMode stability_mode_from_string(const std::string& name);

struct StabilityConfig {
  std::size_t n_runs = 3;
  std::size_t top_k = 5;
  StabilityScope scope = StabilityScope::Global;
  StabilityMode mode = StabilityMode::Resample;
  std::size_t instance = 0;  // test row explained in local scope
};

struct StabilityResult {
  StabilityConfig config;
  std::vector<std::vector<std::string>> runs;  // top-k per run
  std::vector<std::string> intersection;       // in run-0 order
  double score = 0.0;

  nlohmann::json to_json() const;
};

// |intersection of the first top_k names of every run| / top_k.
double stability_score(const std::vector<std::vector<std::string>>& runs, std::size_t top_k,
                        std::vector<std::string>* intersection = nullptr);

// `base` is the model used by Fixed and Resample runs. Run r uses seed
// derive_seed(seed, r) except in Fixed mode, where every run uses `seed`.
StabilityResult stability(const data::Dataset& train, const data::Dataset& test,
                          const nn::Architecture& arch, const nn::TrainConfig& cfg,
                          const nn::DenseNetwork& base, attribution::Method method,
                          const attribution::AttributionSettings& settings,
                          const StabilityConfig& config, std::uint64_t seed);

}  // namespace xaieval::metrics
