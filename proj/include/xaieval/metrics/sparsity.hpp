#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "xaieval/attribution/ranking.hpp"

namespace xaieval::metrics {

struct SparsityPoint {
  double threshold = 0.0;
  double sparsity = 0.0;
};

// 0.0, 0.1, ..., 1.0 computed as i / 10 so the last value is exactly 1.
std::vector<double> default_thresholds();

// sparsity(t) = |{i : normalized_i <= t}| / d. Thresholds must be strictly
// increasing; throws InvalidArgument on an empty ranking.
std::vector<SparsityPoint> sparsity(const attribution::FeatureRanking& ranking,
                                    std::span<const double> thresholds);

nlohmann::json sparsity_payload(const attribution::FeatureRanking& ranking,
                                 const std::vector<SparsityPoint>& curve);

}  // namespace xaieval::metrics
