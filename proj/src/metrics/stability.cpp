#include "xaieval/metrics/stability.hpp"

#include <algorithm>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"
#include "xaieval/metrics/common.hpp"

namespace xaieval::metrics {

const char* to_string(StabilityScope scope) { return scope == StabilityScope::Local ? "local" : "global"; }

const char* to_string(StabilityMode mode) {
  switch (mode) {
    case StabilityMode::Fixed: return "fixed";
    case StabilityMode::Resample: return "resample";
    case StabilityMode::Retrain: return "retrain";
  }
  return "?";
}

StabilityScope stability_scope_from_string(const std::string& name) {
  if (name == "local") return StabilityScope::Local;
  if (name == "global") return StabilityScope::Global;
  throw InvalidArgument("unknown stability scope '" + name + "' (expected local or global)");
}

StabilityMode stability_mode_from_string(const std::string& name) {
  if (name == "fixed") return StabilityMode::Fixed;
  if (name == "resample") return StabilityMode::Resample;
  if (name == "retrain") return StabilityMode::Retrain;
  throw InvalidArgument("unknown stability mode '" + name + "' (expected fixed, resample or retrain)");
}

nlohmann::json StabilityResult::to_json() const {
  return {{"scope", to_string(config.scope)},
          {"mode", to_string(config.mode)},
          {"n_runs", config.n_runs},
          {"top_k", config.top_k},
          {"instance", config.instance},
          {"score", score},
          {"intersection", intersection},
          {"runs", runs}};
}

double stability_score(const std::vector<std::vector<std::string>>& runs, std::size_t top_k,
                       std::vector<std::string>* intersection) {
  if (runs.empty()) throw InvalidArgument("stability needs at least one run");
  if (top_k == 0) throw InvalidArgument("top_k must be positive");
  for (const auto& run : runs)
    if (run.size() < top_k) throw InvalidArgument("every run must list at least top_k features");
  std::vector<std::string> common;
  for (std::size_t i = 0; i < top_k; ++i) {
    const auto& name = runs[0][i];
    const bool everywhere = std::all_of(runs.begin() + 1, runs.end(), [&](const auto& run) {
      return std::find(run.begin(), run.begin() + static_cast<std::ptrdiff_t>(top_k), name) !=
             run.begin() + static_cast<std::ptrdiff_t>(top_k);
    });
    if (everywhere) common.push_back(name);
  }
  const double score = static_cast<double>(common.size()) / static_cast<double>(top_k);
  if (intersection) *intersection = std::move(common);
  return score;
}

StabilityResult stability(const data::Dataset& train, const data::Dataset& test,
                          const nn::Architecture& arch, const nn::TrainConfig& cfg,
                          const nn::DenseNetwork& base, attribution::Method method,
                          const attribution::AttributionSettings& settings,
                          const StabilityConfig& config, std::uint64_t seed) {
  if (config.n_runs < 2) throw InvalidArgument("stability needs n_runs >= 2");
  if (config.top_k == 0 || config.top_k > train.cols())
    throw InvalidArgument("stability top_k must lie in [1, " + std::to_string(train.cols()) + "]");
  if (config.scope == StabilityScope::Local && config.instance >= test.rows())
    throw InvalidArgument("stability instance " + std::to_string(config.instance) +
                          " is outside the test split (" + std::to_string(test.rows()) + " rows)");

  const auto params = settings.resolve(train);
  StabilityResult result;
  result.config = config;
  for (std::size_t r = 0; r < config.n_runs; ++r) {
    const std::uint64_t run_seed = config.mode == StabilityMode::Fixed ? seed : derive_seed(seed, r);
    nn::DenseNetwork retrained;
    const nn::DenseNetwork* net = &base;
    if (config.mode == StabilityMode::Retrain) {
      nn::TrainConfig run_cfg = cfg;
      run_cfg.seed = run_seed;
      retrained = nn::train(train, arch, run_cfg);
      net = &retrained;
    }
    if (config.scope == StabilityScope::Global) {
      result.runs.push_back(
          rank_features(*net, test, method, params, settings, run_seed).top_features(config.top_k));
    } else {
      const auto x = test.row(config.instance);
      const auto target = target_for(*net, test, config.instance, settings.target);
      const auto a = attribution::explain(*net, x, target, method, params);
      const auto order = attribution::rank_by_magnitude(a.scores);
      std::vector<std::string> top;
      for (std::size_t i = 0; i < config.top_k; ++i) top.push_back(test.feature_names[order[i]]);
      result.runs.push_back(std::move(top));
    }
  }
  result.score = stability_score(result.runs, config.top_k, &result.intersection);
  return result;
}

}  // namespace xaieval::metrics
