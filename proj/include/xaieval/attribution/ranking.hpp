#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/batch.hpp"
#include "xaieval/attribution/methods.hpp"
#include "xaieval/data/dataset.hpp"

namespace xaieval::attribution {

// Which logit each sample is explained at.
enum class TargetPolicy { Predicted, TrueLabel };
// How per-sample scores are summed into one global score per feature.
enum class Aggregation { Absolute, Signed };

const char* to_string(TargetPolicy policy);
const char* to_string(Aggregation aggregation);
TargetPolicy target_policy_from_string(const std::string& name);
Aggregation aggregation_from_string(const std::string& name);

struct RankingEntry {
  std::string feature;
  std::size_t index = 0;
  double raw = 0.0;
  double normalized = 0.0;
};

// Features sorted by raw score descending (ties by column index), with
// min-max normalized scores; when every raw score is equal all normalized
// scores are 1.
struct FeatureRanking {
  Method method = Method::IG;
  Aggregation aggregation = Aggregation::Absolute;
  std::vector<RankingEntry> entries;
  std::size_t n_samples_aggregated = 0;
  double max_abs_residual = 0.0;

  std::vector<std::string> top_features(std::size_t k) const;
  std::vector<std::size_t> top_indices(std::size_t k) const;
  // Normalized scores in original column order.
  std::vector<double> normalized_by_column() const;

  nlohmann::json to_json() const;
  static FeatureRanking from_json(const nlohmann::json& j);
};

FeatureRanking make_ranking(std::span<const std::string> names, std::span<const double> raw,
                            Method method, Aggregation aggregation, std::size_t n_samples);

struct GlobalOptions {
  TargetPolicy target = TargetPolicy::Predicted;
  Aggregation aggregation = Aggregation::Absolute;
  Execution execution = Execution::Parallel;
};

// Explains every row of `samples` and sums the per-feature scores.
FeatureRanking global_attribution(const nn::DenseNetwork& net, const data::Dataset& samples,
                                  Method method, const AttributionParams& params,
                                  const GlobalOptions& options = {});

// Aggregates already computed local attributions.
FeatureRanking aggregate(std::span<const Attribution> local, std::span<const std::string> names,
                         Method method, Aggregation aggregation);

}  // namespace xaieval::attribution
