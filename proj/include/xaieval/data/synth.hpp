#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xaieval/data/dataset.hpp"

namespace xaieval::data {

enum class SyntheticRule { Threshold, Linear, Xor };

const char* to_string(SyntheticRule rule);
SyntheticRule synthetic_rule_from_string(const std::string& name);

// Generative recipe for a desk-scale dataset with known informative features.
// Every feature is drawn uniformly from [0,1]; the label depends only on the
// features listed by informative_features().
//   Threshold: class = 1{x[feature] > threshold}
//   Linear:    class = quantile bin of w.x over num_classes bins
//   Xor:       class = (x0 > 0.5) xor (x1 > 0.5)
struct SyntheticSpec {
  std::size_t n = 1000;
  std::size_t d = 10;
  std::size_t num_classes = 2;
  SyntheticRule rule = SyntheticRule::Threshold;
  std::size_t feature = 0;
  double threshold = 0.5;
  std::vector<double> weights;  // Linear only, length d
  double label_noise = 0.0;     // probability of replacing a label at random

  void validate() const;
  std::vector<std::size_t> informative_features() const;
  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& j);
};

Dataset synthesize(const SyntheticSpec& spec, std::uint64_t seed);

// Writes a headered CSV shaped like NSL-KDD (41 flow features, categorical
// protocol_type/service/flag, attack-name labels) with class-dependent
// patterns, for exercising the NSL-KDD schema without the real files.
void write_nslkdd_like_csv(const std::filesystem::path& path, std::size_t rows, std::uint64_t seed);

// Column names of the NSL-KDD flow record, in file order (without the label
// and difficulty columns).
const std::vector<std::string>& nslkdd_feature_columns();
// Schema mapping NSL-KDD attack names onto Normal/DoS/Probe/R2L/U2R.
DatasetSchema nslkdd_schema(bool headerless);

enum class UnrelatedColumn { Random, Constant };

struct RobustnessColumns {
  UnrelatedColumn mode = UnrelatedColumn::Random;
  double constant_value = 0.0;
  std::string unrelated_name = "unrelated";
};

struct RobustnessDatasets {
  Dataset biased;       // original features, labels re-derived from the biased feature
  Dataset adversarial;  // biased labels, original features plus the unrelated column
  double threshold = 0.0;
  std::size_t biased_index = 0;
  std::size_t unrelated_index = 0;
};

// Biased labels are 1{x[biased] > t} with t the midpoint of the feature's
// observed range, so bimodal indicator-like features split at the gap.
RobustnessDatasets inject_robustness_columns(const Dataset& ds, const std::string& biased_feature,
                                             std::uint64_t seed, const RobustnessColumns& opts = {});

double pearson(std::span<const double> a, std::span<const double> b);

}  // namespace xaieval::data
