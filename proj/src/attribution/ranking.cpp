#include "xaieval/attribution/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xaieval/core/error.hpp"

namespace xaieval::attribution {

const char* to_string(TargetPolicy policy) {
  return policy == TargetPolicy::Predicted ? "predicted" : "label";
}

const char* to_string(Aggregation aggregation) {
  return aggregation == Aggregation::Absolute ? "absolute" : "signed";
}

TargetPolicy target_policy_from_string(const std::string& name) {
  if (name == "predicted") return TargetPolicy::Predicted;
  if (name == "label") return TargetPolicy::TrueLabel;
  throw InvalidArgument("unknown target policy '" + name + "' (expected predicted or label)");
}

Aggregation aggregation_from_string(const std::string& name) {
  if (name == "absolute") return Aggregation::Absolute;
  if (name == "signed") return Aggregation::Signed;
  throw InvalidArgument("unknown aggregation '" + name + "' (expected absolute or signed)");
}

std::vector<std::string> FeatureRanking::top_features(std::size_t k) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) out.push_back(entries[i].feature);
  return out;
}

std::vector<std::size_t> FeatureRanking::top_indices(std::size_t k) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, entries.size()); ++i) out.push_back(entries[i].index);
  return out;
}

std::vector<double> FeatureRanking::normalized_by_column() const {
  std::vector<double> out(entries.size(), 0.0);
  for (const auto& e : entries) out.at(e.index) = e.normalized;
  return out;
}

nlohmann::json FeatureRanking::to_json() const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& e : entries)
    features.push_back(
        {{"name", e.feature}, {"index", e.index}, {"raw", e.raw}, {"normalized", e.normalized}});
  return {{"method", to_string(method)},
          {"aggregation", to_string(aggregation)},
          {"n_samples", n_samples_aggregated},
          {"features", features},
          {"residual", max_abs_residual}};
}

FeatureRanking FeatureRanking::from_json(const nlohmann::json& j) {
  FeatureRanking r;
  r.method = method_from_string(j.at("method").get<std::string>());
  r.aggregation = aggregation_from_string(j.value("aggregation", std::string("absolute")));
  r.n_samples_aggregated = j.value("n_samples", std::size_t{0});
  r.max_abs_residual = j.value("residual", 0.0);
  for (const auto& f : j.at("features"))
    r.entries.push_back({f.at("name").get<std::string>(), f.at("index").get<std::size_t>(),
                         f.at("raw").get<double>(), f.at("normalized").get<double>()});
  return r;
}

FeatureRanking make_ranking(std::span<const std::string> names, std::span<const double> raw,
                            Method method, Aggregation aggregation, std::size_t n_samples) {
  if (names.size() != raw.size()) throw ShapeError("one raw score per feature name required");
  if (raw.empty()) throw InvalidArgument("cannot rank an empty feature set");
  FeatureRanking ranking;
  ranking.method = method;
  ranking.aggregation = aggregation;
  ranking.n_samples_aggregated = n_samples;
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  const double span = *hi - *lo;
  for (std::size_t i = 0; i < raw.size(); ++i)
    ranking.entries.push_back(
        {std::string(names[i]), i, raw[i], span > 0.0 ? (raw[i] - *lo) / span : 1.0});
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankingEntry& a, const RankingEntry& b) { return a.raw > b.raw; });
  return ranking;
}

FeatureRanking aggregate(std::span<const Attribution> local, std::span<const std::string> names,
                         Method method, Aggregation aggregation) {
  if (local.empty()) throw InvalidArgument("global attribution needs at least one sample");
  std::vector<double> raw(names.size(), 0.0);
  double worst = 0.0;
  for (const Attribution& a : local) {
    if (a.scores.size() != names.size()) throw ShapeError("attribution width differs from feature count");
    for (std::size_t i = 0; i < raw.size(); ++i)
      raw[i] += aggregation == Aggregation::Absolute ? std::abs(a.scores[i]) : a.scores[i];
    worst = std::max(worst, std::abs(a.residual));
  }
  FeatureRanking ranking = make_ranking(names, raw, method, aggregation, local.size());
  ranking.max_abs_residual = worst;
  return ranking;
}

FeatureRanking global_attribution(const nn::DenseNetwork& net, const data::Dataset& samples,
                                  Method method, const AttributionParams& params,
                                  const GlobalOptions& options) {
  if (samples.rows() == 0) throw InvalidArgument("global attribution needs at least one sample");
  const SampleView view{samples.features, samples.cols()};
  std::vector<std::size_t> targets = options.target == TargetPolicy::Predicted
                                         ? predict_batch(net, view, options.execution)
                                         : samples.labels;
  const auto local = explain_batch(net, view, targets, method, params, options.execution);
  return aggregate(local, samples.feature_names, method, options.aggregation);
}

}  // namespace xaieval::attribution
