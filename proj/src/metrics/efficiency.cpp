#include "xaieval/metrics/efficiency.hpp"

#include <algorithm>
#include <chrono>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"

namespace xaieval::metrics {

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

nlohmann::json EfficiencyResult::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows)
    rows_json.push_back(
        {{"samples", row.samples}, {"label", row.label}, {"with_replacement", row.with_replacement}});
  return {{"repeats", repeats}, {"rows", rows_json}};
}

nlohmann::json EfficiencyResult::measurements() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows)
    rows_json.push_back({{"samples", row.samples}, {"seconds", row.seconds}, {"median_seconds", row.median}});
  return {{"execution", to_string(execution)},
          {"threads", attribution::worker_threads()},
          {"rows", rows_json}};
}

EfficiencyResult efficiency(const nn::DenseNetwork& net, const data::Dataset& test,
                            attribution::Method method,
                            const attribution::AttributionParams& params,
                            const EfficiencyConfig& config, std::uint64_t seed, Execution execution) {
  if (config.counts.empty()) throw InvalidArgument("efficiency needs at least one sample count");
  if (config.repeats == 0) throw InvalidArgument("efficiency needs at least one repeat");
  if (test.rows() == 0) throw InvalidArgument("efficiency needs a non-empty test split");
  EfficiencyResult result;
  result.repeats = config.repeats;
  result.execution = execution;
  for (std::size_t i = 0; i < config.counts.size(); ++i) {
    const std::size_t count = config.counts[i];
    if (count == 0) throw InvalidArgument("efficiency sample counts must be positive");
    EfficiencyRow row;
    row.samples = count;
    row.label = count == 1 ? "1 (Local)" : std::to_string(count);
    const auto rows = sample_indices(test.rows(), count, derive_seed(seed, i), &row.with_replacement);
    const auto batch = test.subset(rows);
    const attribution::SampleView view{batch.features, batch.cols()};
    const auto targets = attribution::predict_batch(net, view, execution);
    for (std::size_t rep = 0; rep < config.repeats; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      const auto out = attribution::explain_batch(net, view, targets, method, params, execution);
      const auto stop = std::chrono::steady_clock::now();
      if (out.size() != count) throw Error("explain_batch returned the wrong number of rows");
      row.seconds.push_back(std::chrono::duration<double>(stop - start).count());
    }
    row.median = median(row.seconds);
    result.rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace xaieval::metrics
