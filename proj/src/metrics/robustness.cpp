#include "xaieval/metrics/robustness.hpp"

#include <algorithm>
#include <numeric>

#include "xaieval/core/error.hpp"
#include "xaieval/core/parallel.hpp"
#include "xaieval/core/random.hpp"

namespace xaieval::metrics {

namespace {

data::Dataset concat(const data::Dataset& a, const data::Dataset& b) {
  if (a.feature_names != b.feature_names) throw ShapeError("train and test features differ");
  data::Dataset out = a;
  out.features.insert(out.features.end(), b.features.begin(), b.features.end());
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

std::vector<std::size_t> iota(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v(to - from);
  std::iota(v.begin(), v.end(), from);
  return v;
}

RobustnessModelResult evaluate_model(const data::Dataset& train, const data::Dataset& test,
                                     const nn::Architecture& arch, const nn::TrainConfig& cfg,
                                     attribution::Method method,
                                     const attribution::AttributionSettings& settings,
                                     const std::vector<std::size_t>& trial_rows, std::size_t ranks,
                                     const std::string& biased, const std::string& unrelated) {
  const auto net = nn::train(train, arch, cfg);
  const auto params = settings.resolve(train);
  RobustnessModelResult result;
  result.test_accuracy = nn::accuracy(net, test);
  const std::size_t depth = std::min(ranks, test.cols());
  result.trial_top.resize(trial_rows.size());
  for_each_index(trial_rows.size(), settings.execution, [&](std::size_t t) {
    const auto x = test.row(trial_rows[t]);
    const auto a = attribution::explain(net, x, nn::predict(net, x), method, params);
    const auto order = attribution::rank_by_magnitude(a.scores);
    for (std::size_t r = 0; r < depth; ++r) result.trial_top[t].push_back(test.feature_names[order[r]]);
  });

  const double trials = static_cast<double>(trial_rows.size());
  std::size_t unrelated_hits = 0;
  for (const auto& top : result.trial_top)
    unrelated_hits += std::find(top.begin(), top.end(), unrelated) != top.end() ? 1 : 0;
  result.unrelated_in_top = 100.0 * static_cast<double>(unrelated_hits) / trials;
  for (std::size_t r = 0; r < depth; ++r) {
    std::size_t nb = 0, nu = 0;
    for (const auto& top : result.trial_top) {
      nb += top[r] == biased ? 1 : 0;
      nu += top[r] == unrelated ? 1 : 0;
    }
    const std::size_t no = trial_rows.size() - nb - nu;
    result.shares.push_back({r + 1, 100.0 * static_cast<double>(nb) / trials,
                             100.0 * static_cast<double>(nu) / trials,
                             100.0 * static_cast<double>(no) / trials});
  }
  return result;
}

}  // namespace

const char* to_string(data::UnrelatedColumn mode) {
  return mode == data::UnrelatedColumn::Random ? "random" : "constant";
}

data::UnrelatedColumn unrelated_mode_from_string(const std::string& name) {
  if (name == "random") return data::UnrelatedColumn::Random;
  if (name == "constant") return data::UnrelatedColumn::Constant;
  throw InvalidArgument("unknown unrelated column mode '" + name + "' (expected random or constant)");
}

nlohmann::json RobustnessModelResult::to_json() const {
  nlohmann::json ranks = nlohmann::json::array();
  for (const auto& s : shares)
    ranks.push_back({{"rank", s.rank}, {"biased", s.biased}, {"unrelated", s.unrelated}, {"other", s.other}});
  return {{"test_accuracy", test_accuracy},
          {"unrelated_in_top", unrelated_in_top},
          {"ranks", ranks},
          {"trial_top", trial_top}};
}

nlohmann::json RobustnessResult::to_json() const {
  return {{"biased_feature", biased_feature},
          {"unrelated_feature", unrelated_feature},
          {"unrelated_mode", to_string(unrelated_mode)},
          {"threshold", threshold},
          {"trials", trial_rows.size()},
          {"trial_rows", trial_rows},
          {"biased", biased.to_json()},
          {"adversarial", adversarial.to_json()}};
}

RobustnessResult robustness(const data::Dataset& train, const data::Dataset& test,
                            const nn::Architecture& arch, const nn::TrainConfig& cfg,
                            attribution::Method method,
                            const attribution::AttributionSettings& settings,
                            const std::string& biased_feature, const RobustnessConfig& config,
                            std::uint64_t seed) {
  if (!train.feature_index(biased_feature))
    throw InvalidArgument("biased feature '" + biased_feature + "' is not a dataset feature");
  if (config.trials == 0) throw InvalidArgument("robustness needs at least one trial");
  if (config.ranks == 0) throw InvalidArgument("robustness needs at least one tracked rank");
  if (test.rows() == 0) throw InvalidArgument("robustness needs a non-empty test split");

  const auto all = concat(train, test);
  const auto injected = data::inject_robustness_columns(all, biased_feature, derive_seed(seed, 0), config.columns);
  const auto train_rows = iota(0, train.rows());
  const auto test_rows = iota(train.rows(), all.rows());

  RobustnessResult result;
  result.biased_feature = biased_feature;
  result.unrelated_feature = config.columns.unrelated_name;
  result.unrelated_mode = config.columns.mode;
  result.threshold = injected.threshold;
  result.trial_rows = sample_indices(test.rows(), config.trials, derive_seed(seed, 1));

  result.biased = evaluate_model(injected.biased.subset(train_rows), injected.biased.subset(test_rows), arch,
                                 cfg, method, settings, result.trial_rows, config.ranks, biased_feature,
                                 result.unrelated_feature);
  result.adversarial = evaluate_model(injected.adversarial.subset(train_rows),
                                      injected.adversarial.subset(test_rows), arch, cfg, method, settings,
                                      result.trial_rows, config.ranks, biased_feature,
                                      result.unrelated_feature);
  return result;
}

}  // namespace xaieval::metrics
