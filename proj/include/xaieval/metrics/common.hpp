#pragma once

#include <cstdint>

#include "xaieval/attribution/ranking.hpp"
#include "xaieval/attribution/settings.hpp"
#include "xaieval/data/dataset.hpp"
#include "xaieval/nn/network.hpp"

namespace xaieval::metrics {

// Global ranking over min(settings.global_samples, rows) test rows drawn
// without replacement with `seed`.
attribution::FeatureRanking rank_features(const nn::DenseNetwork& net, const data::Dataset& samples,
                                          attribution::Method method,
                                          const attribution::AttributionParams& params,
                                          const attribution::AttributionSettings& settings,
                                          std::uint64_t seed);

// Fraction of `ds` labels equal to the most frequent label of `reference`.
double majority_rate(const data::Dataset& reference, const data::Dataset& ds);

// Target logit for one row under the configured policy.
std::size_t target_for(const nn::DenseNetwork& net, const data::Dataset& ds, std::size_t row,
                       attribution::TargetPolicy policy);

}  // namespace xaieval::metrics
