#include "xaieval/metrics/descriptive_accuracy.hpp"

#include <algorithm>

#include "xaieval/core/error.hpp"
#include "xaieval/core/parallel.hpp"
#include "xaieval/metrics/common.hpp"

namespace xaieval::metrics {

const char* to_string(RemovalMode mode) { return mode == RemovalMode::Retrain ? "retrain" : "mask"; }

RemovalMode removal_mode_from_string(const std::string& name) {
  if (name == "retrain") return RemovalMode::Retrain;
  if (name == "mask") return RemovalMode::Mask;
  throw InvalidArgument("unknown removal mode '" + name + "' (expected retrain or mask)");
}

std::vector<std::size_t> default_k_list(std::size_t d) {
  if (d == 0) throw InvalidArgument("dataset has no features");
  std::vector<std::size_t> ks;
  for (std::size_t k : {0, 5, 10, 25, 50, 70}) {
    const std::size_t capped = std::min(k, d - 1);
    if (ks.empty() || ks.back() != capped) ks.push_back(capped);
  }
  return ks;
}

nlohmann::json DescriptiveAccuracyResult::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) pts.push_back({{"k", p.k}, {"accuracy", p.accuracy}, {"removed", p.removed}});
  return {{"mode", to_string(mode)}, {"ranking", ranking}, {"majority_rate", majority_rate}, {"points", pts}};
}

DescriptiveAccuracyResult descriptive_accuracy(const data::Dataset& train, const data::Dataset& test,
                                               const nn::Architecture& arch,
                                               const nn::TrainConfig& cfg,
                                               const nn::DenseNetwork& base,
                                               const attribution::FeatureRanking& ranking,
                                               const DescriptiveAccuracyConfig& config) {
  const std::size_t d = train.cols();
  if (test.cols() != d || ranking.entries.size() != d)
    throw ShapeError("train, test and ranking must cover the same features");
  const auto ks = config.k_list.empty() ? default_k_list(d) : config.k_list;
  if (ks.front() != 0) throw InvalidArgument("k_list must start at 0");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] >= d)
      throw InvalidArgument("k=" + std::to_string(ks[i]) + " would remove every feature (d=" +
                            std::to_string(d) + ")");
    if (i > 0 && ks[i] <= ks[i - 1]) throw InvalidArgument("k_list must be strictly increasing");
  }

  DescriptiveAccuracyResult result;
  result.mode = config.mode;
  result.ranking = ranking.top_features(d);
  result.majority_rate = majority_rate(train, test);
  result.points.resize(ks.size());

  const auto order = ranking.top_indices(d);
  auto evaluate = [&](std::size_t i) {
    AccuracyPoint& point = result.points[i];
    point.k = ks[i];
    point.removed.assign(result.ranking.begin(), result.ranking.begin() + static_cast<std::ptrdiff_t>(ks[i]));
    if (ks[i] == 0) {
      point.accuracy = nn::accuracy(base, test);
      return;
    }
    std::vector<std::size_t> drop(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(ks[i]));
    if (config.mode == RemovalMode::Mask) {
      data::Dataset masked = test;
      for (std::size_t r = 0; r < masked.rows(); ++r)
        for (std::size_t c : drop) masked.row(r)[c] = 0.0;
      point.accuracy = nn::accuracy(base, masked);
    } else {
      const auto reduced_train = train.without_features(drop);
      const auto model = nn::train(reduced_train, arch, cfg);
      point.accuracy = nn::accuracy(model, test.without_features(drop));
    }
  };
  for_each_index(ks.size(), config.parallel ? Execution::Parallel : Execution::Serial, evaluate);
  return result;
}

}  // namespace xaieval::metrics
