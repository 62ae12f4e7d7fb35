#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace xaieval::data {

// Per-feature min/max used for min-max scaling.
struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

// Dense row-major sample matrix with integer class labels.
//
// After preprocess() every value lies in [0,1]; feature_names are unique and
// every label is below class_names.size().
struct Dataset {
  std::vector<double> features;  // rows * cols, row-major
  std::vector<std::size_t> labels;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<FeatureRange> normalization;  // empty until preprocessed

  std::size_t rows() const { return labels.size(); }
  std::size_t cols() const { return feature_names.size(); }
  std::size_t num_classes() const { return class_names.size(); }

  std::span<const double> row(std::size_t r) const { return {features.data() + r * cols(), cols()}; }
  std::span<double> row(std::size_t r) { return {features.data() + r * cols(), cols()}; }
  double at(std::size_t r, std::size_t c) const { return features[r * cols() + c]; }

  std::optional<std::size_t> feature_index(const std::string& name) const;

  // Throws DataError if shapes disagree, names repeat, a label is out of
  // range or a value is not finite.
  void validate() const;

  Dataset subset(std::span<const std::size_t> indices) const;
  Dataset without_features(std::span<const std::size_t> columns) const;
  std::vector<std::size_t> class_counts() const;
  // Column means, used as the DeepLift reference.
  std::vector<double> column_means() const;
};

// Column roles for CSV ingestion. When column_names is non-empty the file is
// treated as headerless and those names are used instead.
struct DatasetSchema {
  std::string label_column;
  std::vector<std::string> categorical_columns;
  std::vector<std::string> drop_columns;
  std::map<std::string, std::size_t> label_mapping;  // raw label -> class index
  std::vector<std::string> class_names;
  std::vector<std::string> column_names;

  void validate() const;
  static DatasetSchema from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static DatasetSchema load(const std::filesystem::path& path);
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t dropped = 0;
  std::map<std::string, std::size_t> drop_reasons;
  std::vector<std::string> constant_columns;
  std::size_t clipped_values = 0;

  nlohmann::json to_json() const;
};

// Raw (unnormalized) table: numeric columns parsed, categorical columns kept
// as strings until preprocessing one-hot encodes them.
struct RawTable {
  std::vector<std::string> numeric_names;
  std::vector<std::string> categorical_names;
  std::vector<std::vector<double>> numeric;           // per row
  std::vector<std::vector<std::string>> categorical;  // per row
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;
  IngestReport report;

  std::size_t rows() const { return labels.size(); }
  RawTable subset(std::span<const std::size_t> indices) const;
};

RawTable load_csv(const std::filesystem::path& path, const DatasetSchema& schema);

// Learned preprocessing: one-hot vocabularies and min-max statistics fitted
// on one table (the training split) and applied to others.
class Preprocessor {
 public:
  static Preprocessor fit(const RawTable& train);

  // Constant columns map to 0; values outside the fitted range are clipped.
  Dataset apply(const RawTable& table, IngestReport* report = nullptr) const;

  const std::vector<std::string>& output_names() const { return output_names_; }
  const std::vector<std::string>& constant_columns() const { return constant_columns_; }

 private:
  std::vector<std::string> numeric_names_;
  std::vector<FeatureRange> numeric_ranges_;
  std::vector<std::string> categorical_names_;
  std::vector<std::vector<std::string>> vocab_;  // sorted per categorical column
  std::vector<std::string> output_names_;
  std::vector<std::string> constant_columns_;
};

// Fit on `raw` and apply to it in one go.
Dataset preprocess(const RawTable& raw, IngestReport* report = nullptr);

// Min-max scale an already-numeric dataset using `fit_on`'s ranges.
Dataset scale_like(const Dataset& ds, const std::vector<FeatureRange>& ranges,
                   std::size_t* clipped = nullptr);
std::vector<FeatureRange> fit_ranges(const Dataset& ds);

// Stratified split: each class contributes round(ratio * count) samples to
// the first part. Deterministic in seed; throws naming any class with fewer
// than 2 samples.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::span<const std::size_t> labels, std::span<const std::string> class_names, double ratio,
    std::uint64_t seed);

std::pair<Dataset, Dataset> split(const Dataset& ds, double ratio, std::uint64_t seed);
std::pair<RawTable, RawTable> split(const RawTable& table, double ratio, std::uint64_t seed);

// Writes features plus a trailing "label" column holding class names.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

}  // namespace xaieval::data
