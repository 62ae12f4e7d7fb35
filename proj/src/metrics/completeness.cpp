#include "xaieval/metrics/completeness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"

namespace xaieval::metrics {

std::vector<double> sweep_grid(double step) {
  if (!(step > 0.0) || step > 1.0) throw InvalidArgument("sweep step must lie in (0, 1]");
  const double n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9) throw InvalidArgument("sweep step must divide 1.0 evenly");
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> grid(count + 1);
  for (std::size_t i = 0; i <= count; ++i) grid[i] = static_cast<double>(i) / n;
  return grid;
}

nlohmann::json PerturbationTrace::to_json() const {
  nlohmann::json steps_json = nlohmann::json::array();
  for (const auto& s : steps)
    steps_json.push_back({{"feature", s.feature}, {"value", s.value}, {"new_class", s.new_class}});
  return {{"instance_id", instance_id},
          {"original_class", original_class},
          {"changed", changed},
          {"features_touched", features_touched},
          {"steps", steps_json}};
}

PerturbationTrace completeness_local(const nn::DenseNetwork& net, std::span<const double> x,
                                     attribution::Method method,
                                     const attribution::AttributionParams& params,
                                     std::size_t max_features, double step, std::size_t instance_id) {
  const auto grid = sweep_grid(step);
  PerturbationTrace trace;
  trace.instance_id = instance_id;
  trace.original_class = nn::predict(net, x);
  const auto a = attribution::explain(net, x, trace.original_class, method, params);
  const auto order = attribution::rank_by_magnitude(a.scores);
  const auto& names = net.feature_names();

  std::vector<double> probe(x.begin(), x.end());
  const std::size_t features = std::min(max_features, probe.size());
  for (std::size_t f = 0; f < features; ++f) {
    const std::size_t c = order[f];
    const double original = x[c];
    ++trace.features_touched;
    for (double v : grid) {
      if (std::abs(v - original) < 1e-12) continue;
      probe[c] = v;
      const std::size_t cls = nn::predict(net, probe);
      trace.steps.push_back({names[c], c, v, cls});
      if (cls != trace.original_class) {
        trace.changed = true;
        return trace;
      }
    }
    probe[c] = std::abs(original - 1.0);
  }
  return trace;
}

nlohmann::json CompletenessResult::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : per_class)
    classes.push_back({{"class", c.name},
                       {"available", c.available},
                       {"total", c.total},
                       {"changed", c.changed},
                       {"percent", c.percent}});
  nlohmann::json curve = nlohmann::json::array();
  for (std::size_t s = 0; s < remaining.size(); ++s) curve.push_back({{"step", s}, {"remaining", remaining[s]}});
  std::size_t total = 0, changed = 0;
  for (const auto& c : per_class) {
    total += c.total;
    changed += c.changed;
  }
  return {{"batch_per_class", config.batch_per_class},
          {"max_features", config.max_features},
          {"step", config.step},
          {"per_class", classes},
          {"overall_percent", total ? 100.0 * static_cast<double>(changed) / static_cast<double>(total) : 0.0},
          {"curve", curve}};
}

CompletenessResult completeness_global(const nn::DenseNetwork& net, const data::Dataset& test,
                                       attribution::Method method,
                                       const attribution::AttributionParams& params,
                                       const CompletenessConfig& config, std::uint64_t seed,
                                       Execution execution) {
  const auto grid = sweep_grid(config.step);
  if (config.batch_per_class == 0) throw InvalidArgument("batch_per_class must be positive");
  if (config.max_features == 0) throw InvalidArgument("max_features must be positive");
  const auto counts = test.class_counts();

  std::vector<std::size_t> classes;
  if (config.classes.empty()) {
    for (std::size_t k = 0; k < counts.size(); ++k)
      if (counts[k] > 0) classes.push_back(k);
  } else {
    for (const auto& name : config.classes) {
      const auto it = std::find(test.class_names.begin(), test.class_names.end(), name);
      if (it == test.class_names.end())
        throw DataError("completeness: unknown class '" + name + "'");
      const auto k = static_cast<std::size_t>(it - test.class_names.begin());
      if (counts[k] == 0) throw DataError("completeness: class '" + name + "' has no test samples");
      classes.push_back(k);
    }
  }
  if (classes.empty()) throw DataError("completeness: the test split is empty");

  CompletenessResult result;
  result.config = config;
  std::vector<std::size_t> rows;
  std::vector<std::size_t> owner;  // index into per_class
  for (std::size_t k : classes) {
    std::vector<std::size_t> members;
    for (std::size_t r = 0; r < test.rows(); ++r)
      if (test.labels[r] == k) members.push_back(r);
    const std::size_t take = std::min(config.batch_per_class, members.size());
    auto picks = sample_indices(members.size(), take, derive_seed(seed, k));
    std::sort(picks.begin(), picks.end());
    for (std::size_t p : picks) {
      rows.push_back(members[p]);
      owner.push_back(result.per_class.size());
    }
    result.per_class.push_back({test.class_names[k], members.size(), take, 0, 0.0});
  }

  result.traces.resize(rows.size());
  for_each_index(rows.size(), execution, [&](std::size_t i) {
    result.traces[i] = completeness_local(net, test.row(rows[i]), method, params, config.max_features,
                                          config.step, rows[i]);
  });

  const std::size_t max_steps = std::min(config.max_features, test.cols()) * grid.size();
  std::vector<std::size_t> flips_at(max_steps + 2, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& t = result.traces[i];
    if (t.changed) {
      ++result.per_class[owner[i]].changed;
      ++flips_at[t.steps.size()];
    }
  }
  for (auto& c : result.per_class)
    c.percent = 100.0 * static_cast<double>(c.changed) / static_cast<double>(c.total);
  std::size_t still = rows.size();
  for (std::size_t s = 0; s <= max_steps; ++s) {
    still -= flips_at[s];
    result.remaining.push_back(static_cast<double>(still) / static_cast<double>(rows.size()));
  }
  return result;
}

}  // namespace xaieval::metrics
