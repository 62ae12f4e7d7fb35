#include "xaieval/metrics/sparsity.hpp"

#include "xaieval/core/error.hpp"

namespace xaieval::metrics {

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 10; ++i) t.push_back(i / 10.0);
  return t;
}

std::vector<SparsityPoint> sparsity(const attribution::FeatureRanking& ranking,
                                    std::span<const double> thresholds) {
  if (ranking.entries.empty()) throw InvalidArgument("sparsity of an empty ranking");
  if (thresholds.empty()) throw InvalidArgument("sparsity needs at least one threshold");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (!(thresholds[i] > thresholds[i - 1]))
      throw InvalidArgument("sparsity thresholds must be strictly increasing");
  const double d = static_cast<double>(ranking.entries.size());
  std::vector<SparsityPoint> curve;
  curve.reserve(thresholds.size());
  for (double t : thresholds) {
    std::size_t below = 0;
    for (const auto& e : ranking.entries) below += e.normalized <= t ? 1 : 0;
    curve.push_back({t, static_cast<double>(below) / d});
  }
  return curve;
}

nlohmann::json sparsity_payload(const attribution::FeatureRanking& ranking,
                                 const std::vector<SparsityPoint>& curve) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : curve) pts.push_back({{"threshold", p.threshold}, {"sparsity", p.sparsity}});
  return {{"n_features", ranking.entries.size()}, {"points", pts}, {"ranking", ranking.to_json()}};
}

}  // namespace xaieval::metrics
