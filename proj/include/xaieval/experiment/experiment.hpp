#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/ranking.hpp"
#include "xaieval/data/dataset.hpp"
#include "xaieval/experiment/config.hpp"
#include "xaieval/metrics/report.hpp"
#include "xaieval/nn/network.hpp"
#include "xaieval/nn/train.hpp"

namespace xaieval::experiment {

// Seed streams derived from the master seed.
enum SeedStream : std::uint64_t {
  kSynthStream = 0,
  kSplitStream = 1,
  kRankingStream = 2,
  kSubsampleStream = 3,
  kMetricStreamBase = 10,  // + metric index
};

struct PreparedData {
  data::Dataset train;
  data::Dataset test;
  std::string dataset_id;
  data::IngestReport ingest;
};

// Loads or synthesizes the dataset, subsamples to max_rows, splits and
// preprocesses (fitted on the training part only).
PreparedData prepare_data(const ExperimentConfig& config);

// One configured run. Data, the base model and per-method global rankings
// are built on first use and cached, so evaluating several metrics shares
// them. Everything is a pure function of the config.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const PreparedData& data();
  const nn::DenseNetwork& model();
  const nn::TrainReport& train_report();
  // Uses `net` instead of training one from the config.
  void set_model(nn::DenseNetwork net);

  const attribution::AttributionParams& params();
  const attribution::FeatureRanking& ranking(attribution::Method method);
  // Highest summed normalized score over all three methods' rankings.
  std::vector<std::string> consensus_top(std::size_t k);

  // Config with data-dependent defaults (such as k_list) filled in.
  nlohmann::json snapshot();
  std::uint64_t metric_seed(metrics::Metric metric) const;

  metrics::MetricReport run(metrics::Metric metric, attribution::Method method);

 private:
  ExperimentConfig config_;
  std::optional<PreparedData> data_;
  std::optional<nn::DenseNetwork> model_;
  nn::TrainReport train_report_;
  std::optional<attribution::AttributionParams> params_;
  std::map<attribution::Method, attribution::FeatureRanking> rankings_;
};

struct ReplayResult {
  metrics::MetricReport original;
  metrics::MetricReport replayed;
  bool identical = false;
};

// Rebuilds the experiment from the report's embedded config snapshot and
// compares payloads byte for byte.
ReplayResult replay(const metrics::MetricReport& report);

}  // namespace xaieval::experiment
