#include "xaieval/experiment/experiment.hpp"

#include <algorithm>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"
#include "xaieval/metrics/common.hpp"
#include "xaieval/metrics/sparsity.hpp"

namespace xaieval::experiment {

using attribution::Method;
using metrics::Metric;

namespace {

std::string synthetic_id(const data::SyntheticSpec& s) {
  return "synthetic-" + std::string(data::to_string(s.rule)) + "-n" + std::to_string(s.n) + "-d" +
         std::to_string(s.d);
}

data::RawTable cap_rows(const data::RawTable& raw, std::size_t max_rows, std::uint64_t seed) {
  if (max_rows == 0 || raw.rows() <= max_rows) return raw;
  auto rows = sample_indices(raw.rows(), max_rows, seed);
  std::sort(rows.begin(), rows.end());
  return raw.subset(rows);
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& config) {
  PreparedData out;
  const auto& src = config.dataset;
  if (src.synthetic) {
    const auto ds = data::synthesize(*src.synthetic, derive_seed(config.seed, kSynthStream));
    std::tie(out.train, out.test) = data::split(ds, config.split_ratio, derive_seed(config.seed, kSplitStream));
    out.dataset_id = src.id.empty() ? synthetic_id(*src.synthetic) : src.id;
    out.ingest.rows_read = out.ingest.rows_kept = ds.rows();
    return out;
  }
  const auto raw = cap_rows(data::load_csv(src.csv, *src.schema), src.max_rows,
                            derive_seed(config.seed, kSubsampleStream));
  out.ingest = raw.report;
  data::RawTable train_raw, test_raw;
  if (src.test_csv.empty()) {
    std::tie(train_raw, test_raw) = data::split(raw, config.split_ratio, derive_seed(config.seed, kSplitStream));
  } else {
    train_raw = raw;
    test_raw = cap_rows(data::load_csv(src.test_csv, *src.schema), src.max_rows,
                        derive_seed(config.seed, kSubsampleStream + 100));
    if (test_raw.class_names != train_raw.class_names)
      throw DataError("test_csv classes differ from the training file's classes");
  }
  const auto pre = data::Preprocessor::fit(train_raw);
  out.train = pre.apply(train_raw, &out.ingest);
  out.test = pre.apply(test_raw, &out.ingest);
  out.dataset_id = src.id.empty() ? src.csv.stem().string() : src.id;
  return out;
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
  if (config_.threads > 0) attribution::set_worker_threads(config_.threads);
}

const PreparedData& Experiment::data() {
  if (!data_) data_ = prepare_data(config_);
  return *data_;
}

const nn::DenseNetwork& Experiment::model() {
  if (!model_) model_ = nn::train(data().train, config_.architecture, config_.train, &train_report_);
  return *model_;
}

const nn::TrainReport& Experiment::train_report() {
  model();
  return train_report_;
}

void Experiment::set_model(nn::DenseNetwork net) {
  if (net.input_dim() != data().train.cols() || net.feature_names() != data().train.feature_names)
    throw ShapeError("model features do not match the configured dataset");
  if (net.num_classes() != data().train.num_classes())
    throw ShapeError("model class count does not match the configured dataset");
  model_ = std::move(net);
  rankings_.clear();
}

const attribution::AttributionParams& Experiment::params() {
  if (!params_) params_ = config_.attribution.resolve(data().train);
  return *params_;
}

const attribution::FeatureRanking& Experiment::ranking(Method method) {
  auto it = rankings_.find(method);
  if (it == rankings_.end()) {
    auto r = metrics::rank_features(model(), data().test, method, params(), config_.attribution,
                                    derive_seed(config_.seed, kRankingStream));
    it = rankings_.emplace(method, std::move(r)).first;
  }
  return it->second;
}

std::vector<std::string> Experiment::consensus_top(std::size_t k) {
  const auto& names = data().train.feature_names;
  std::vector<double> total(names.size(), 0.0);
  for (Method m : attribution::kAllMethods) {
    const auto normalized = ranking(m).normalized_by_column();
    for (std::size_t c = 0; c < total.size(); ++c) total[c] += normalized[c];
  }
  const auto r = attribution::make_ranking(names, total, Method::IG, attribution::Aggregation::Absolute, 0);
  return r.top_features(std::min(k, names.size()));
}

nlohmann::json Experiment::snapshot() {
  ExperimentConfig resolved = config_;
  auto& ks = resolved.metrics.descriptive_accuracy.k_list;
  if (ks.empty()) ks = metrics::default_k_list(data().train.cols());
  if (resolved.metrics.sparsity_thresholds.empty()) resolved.metrics.sparsity_thresholds = metrics::default_thresholds();
  return resolved.to_json();
}

std::uint64_t Experiment::metric_seed(Metric metric) const {
  return derive_seed(config_.seed, kMetricStreamBase + static_cast<std::uint64_t>(metric));
}

metrics::MetricReport Experiment::run(Metric metric, Method method) {
  const auto& d = data();
  const auto& ms = config_.metrics;
  const auto seed = metric_seed(metric);
  metrics::MetricReport report;
  report.metric = metric;
  report.method = method;
  report.dataset_id = d.dataset_id;
  report.seed = config_.seed;
  report.config = snapshot();

  switch (metric) {
    case Metric::DescriptiveAccuracy: {
      auto dc = ms.descriptive_accuracy;
      if (dc.k_list.empty()) dc.k_list = metrics::default_k_list(d.train.cols());
      report.payload = metrics::descriptive_accuracy(d.train, d.test, config_.architecture, config_.train,
                                                     model(), ranking(method), dc)
                           .to_json();
      break;
    }
    case Metric::Sparsity: {
      const auto t = ms.sparsity_thresholds.empty() ? metrics::default_thresholds() : ms.sparsity_thresholds;
      report.payload = metrics::sparsity_payload(ranking(method), metrics::sparsity(ranking(method), t));
      break;
    }
    case Metric::Efficiency: {
      const auto r = metrics::efficiency(model(), d.test, method, params(), ms.efficiency, seed,
                                         config_.attribution.execution);
      report.payload = r.to_json();
      report.measurements = r.measurements();
      break;
    }
    case Metric::Stability:
      report.payload = metrics::stability(d.train, d.test, config_.architecture, config_.train, model(), method,
                                          config_.attribution, ms.stability, seed)
                           .to_json();
      break;
    case Metric::Robustness: {
      std::string feature = ms.biased_feature;
      const auto context = consensus_top(6);
      if (feature.empty()) feature = context.front();
      report.payload = metrics::robustness(d.train, d.test, config_.architecture, config_.train, method,
                                           config_.attribution, feature, ms.robustness, seed)
                           .to_json();
      report.payload["top6_context"] = context;
      report.payload["biased_feature_source"] = ms.biased_feature.empty() ? "consensus_top1" : "config";
      break;
    }
    case Metric::Completeness:
      report.payload = metrics::completeness_global(model(), d.test, method, params(), ms.completeness, seed,
                                                    config_.attribution.execution)
                           .to_json();
      break;
  }
  return report;
}

ReplayResult replay(const metrics::MetricReport& report) {
  ReplayResult out;
  out.original = report;
  Experiment ex(ExperimentConfig::from_json(report.config, {}));
  out.replayed = ex.run(report.metric, report.method);
  out.identical = out.replayed.payload_text() == report.payload_text() &&
                  out.replayed.dataset_id == report.dataset_id && out.replayed.seed == report.seed;
  return out;
}

}  // namespace xaieval::experiment
