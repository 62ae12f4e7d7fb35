#include "xaieval/attribution/settings.hpp"

#include "xaieval/core/error.hpp"

namespace xaieval::attribution {

const char* to_string(ReferencePolicy policy) {
  return policy == ReferencePolicy::Zeros ? "zeros" : "train_mean";
}

ReferencePolicy reference_policy_from_string(const std::string& name) {
  if (name == "zeros") return ReferencePolicy::Zeros;
  if (name == "train_mean") return ReferencePolicy::TrainMean;
  throw ConfigError("unknown reference '" + name + "' (expected zeros or train_mean)");
}

void AttributionSettings::validate() const {
  if (ig_steps < 1) throw ConfigError("attribution.ig_steps must be at least 1");
  if (!(lrp_epsilon > 0.0)) throw ConfigError("attribution.lrp_epsilon must be positive");
  if (global_samples < 1) throw ConfigError("attribution.global_samples must be at least 1");
}

AttributionParams AttributionSettings::resolve(const data::Dataset& train) const {
  AttributionParams p;
  p.ig_steps = ig_steps;
  p.lrp_epsilon = lrp_epsilon;
  const auto d = train.cols();
  std::vector<double> means;
  if (ig_baseline == ReferencePolicy::TrainMean || deeplift_reference == ReferencePolicy::TrainMean)
    means = train.column_means();
  p.ig_baseline = ig_baseline == ReferencePolicy::TrainMean ? means : std::vector<double>(d, 0.0);
  p.deeplift_reference =
      deeplift_reference == ReferencePolicy::TrainMean ? means : std::vector<double>(d, 0.0);
  return p;
}

GlobalOptions AttributionSettings::global_options() const {
  GlobalOptions o;
  o.target = target;
  o.aggregation = aggregation;
  o.execution = execution;
  return o;
}

nlohmann::json AttributionSettings::to_json() const {
  return {{"ig_steps", ig_steps},
          {"ig_baseline", to_string(ig_baseline)},
          {"lrp_epsilon", lrp_epsilon},
          {"deeplift_reference", to_string(deeplift_reference)},
          {"target", to_string(target)},
          {"aggregation", to_string(aggregation)},
          {"global_samples", global_samples}};
}

AttributionSettings AttributionSettings::from_json(const nlohmann::json& j) {
  AttributionSettings s;
  if (!j.is_object()) throw ConfigError("attribution must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "ig_steps") s.ig_steps = value.get<std::size_t>();
    else if (key == "ig_baseline") s.ig_baseline = reference_policy_from_string(value.get<std::string>());
    else if (key == "lrp_epsilon") s.lrp_epsilon = value.get<double>();
    else if (key == "deeplift_reference")
      s.deeplift_reference = reference_policy_from_string(value.get<std::string>());
    else if (key == "target") s.target = target_policy_from_string(value.get<std::string>());
    else if (key == "aggregation") s.aggregation = aggregation_from_string(value.get<std::string>());
    else if (key == "global_samples") s.global_samples = value.get<std::size_t>();
    else throw ConfigError("unknown key attribution." + key);
  }
  s.validate();
  return s;
}

}  // namespace xaieval::attribution
