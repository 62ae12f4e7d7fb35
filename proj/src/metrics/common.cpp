#include "xaieval/metrics/common.hpp"

#include <algorithm>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"

namespace xaieval::metrics {

attribution::FeatureRanking rank_features(const nn::DenseNetwork& net, const data::Dataset& samples,
                                          attribution::Method method,
                                          const attribution::AttributionParams& params,
                                          const attribution::AttributionSettings& settings,
                                          std::uint64_t seed) {
  if (samples.rows() == 0) throw InvalidArgument("cannot rank features on an empty split");
  const std::size_t count = std::min(settings.global_samples, samples.rows());
  auto rows = sample_indices(samples.rows(), count, seed);
  std::sort(rows.begin(), rows.end());
  return attribution::global_attribution(net, samples.subset(rows), method, params,
                                         settings.global_options());
}

double majority_rate(const data::Dataset& reference, const data::Dataset& ds) {
  if (ds.rows() == 0) return 0.0;
  const auto counts = reference.class_counts();
  const auto majority =
      static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  const auto hits = std::count(ds.labels.begin(), ds.labels.end(), majority);
  return static_cast<double>(hits) / static_cast<double>(ds.rows());
}

std::size_t target_for(const nn::DenseNetwork& net, const data::Dataset& ds, std::size_t row,
                       attribution::TargetPolicy policy) {
  return policy == attribution::TargetPolicy::Predicted ? nn::predict(net, ds.row(row))
                                                        : ds.labels[row];
}

}  // namespace xaieval::metrics
