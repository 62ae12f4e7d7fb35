#include "xaieval/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"

namespace xaieval::data {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// RFC 4180-ish: commas separate fields, double quotes group, "" escapes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(trim(field));
  return fields;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

bool contains(const std::vector<std::string>& names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

std::optional<std::size_t> Dataset::feature_index(const std::string& name) const {
  const auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

void Dataset::validate() const {
  if (features.size() != rows() * cols())
    throw DataError("feature matrix size does not equal rows*cols");
  std::set<std::string> seen;
  for (const auto& name : feature_names)
    if (!seen.insert(name).second) throw DataError("duplicate feature name '" + name + "'");
  for (std::size_t r = 0; r < rows(); ++r)
    if (labels[r] >= num_classes())
      throw DataError("label " + std::to_string(labels[r]) + " at row " + std::to_string(r) +
                      " exceeds class count " + std::to_string(num_classes()));
  for (double v : features)
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  if (!normalization.empty() && normalization.size() != cols())
    throw DataError("normalization table size does not match feature count");
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.feature_names = feature_names;
  out.class_names = class_names;
  out.normalization = normalization;
  out.features.reserve(indices.size() * cols());
  out.labels.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= rows()) throw InvalidArgument("subset index out of range");
    const auto r = row(idx);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[idx]);
  }
  return out;
}

Dataset Dataset::without_features(std::span<const std::size_t> columns) const {
  std::vector<bool> drop(cols(), false);
  for (std::size_t c : columns) {
    if (c >= cols()) throw InvalidArgument("feature column out of range");
    drop[c] = true;
  }
  Dataset out;
  out.class_names = class_names;
  out.labels = labels;
  for (std::size_t c = 0; c < cols(); ++c) {
    if (drop[c]) continue;
    out.feature_names.push_back(feature_names[c]);
    if (!normalization.empty()) out.normalization.push_back(normalization[c]);
  }
  out.features.reserve(rows() * out.cols());
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c)
      if (!drop[c]) out.features.push_back(at(r, c));
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (std::size_t label : labels) ++counts.at(label);
  return counts;
}

std::vector<double> Dataset::column_means() const {
  std::vector<double> means(cols(), 0.0);
  if (rows() == 0) return means;
  for (std::size_t r = 0; r < rows(); ++r)
    for (std::size_t c = 0; c < cols(); ++c) means[c] += at(r, c);
  for (double& m : means) m /= static_cast<double>(rows());
  return means;
}

// ---------------------------------------------------------------------------
// Schema and report

void DatasetSchema::validate() const {
  if (label_column.empty()) throw DataError("schema: label_column is required");
  if (contains(categorical_columns, label_column))
    throw DataError("schema: label column '" + label_column + "' is also listed as categorical");
  for (const auto& [raw, index] : label_mapping)
    if (!class_names.empty() && index >= class_names.size())
      throw DataError("schema: label '" + raw + "' maps to class " + std::to_string(index) +
                      " but only " + std::to_string(class_names.size()) + " class names given");
}

DatasetSchema DatasetSchema::from_json(const nlohmann::json& j) {
  DatasetSchema s;
  try {
    s.label_column = j.at("label_column").get<std::string>();
    s.categorical_columns = j.value("categorical_columns", std::vector<std::string>{});
    s.drop_columns = j.value("drop_columns", std::vector<std::string>{});
    s.class_names = j.value("class_names", std::vector<std::string>{});
    s.column_names = j.value("column_names", std::vector<std::string>{});
    if (j.contains("label_mapping"))
      for (const auto& [raw, index] : j.at("label_mapping").items())
        s.label_mapping[raw] = index.get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json DatasetSchema::to_json() const {
  nlohmann::json j;
  j["label_column"] = label_column;
  j["categorical_columns"] = categorical_columns;
  j["drop_columns"] = drop_columns;
  j["class_names"] = class_names;
  j["label_mapping"] = nlohmann::json::object();
  for (const auto& [raw, index] : label_mapping) j["label_mapping"][raw] = index;
  if (!column_names.empty()) j["column_names"] = column_names;
  return j;
}

DatasetSchema DatasetSchema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schema file " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("schema " + path.string() + ": " + e.what());
  }
}

nlohmann::json IngestReport::to_json() const {
  nlohmann::json j;
  j["rows_read"] = rows_read;
  j["rows_kept"] = rows_kept;
  j["dropped"] = dropped;
  j["drop_reasons"] = nlohmann::json::object();
  for (const auto& [reason, count] : drop_reasons) j["drop_reasons"][reason] = count;
  j["constant_columns"] = constant_columns;
  j["clipped_values"] = clipped_values;
  return j;
}

// ---------------------------------------------------------------------------
// CSV ingestion

RawTable RawTable::subset(std::span<const std::size_t> indices) const {
  RawTable out;
  out.numeric_names = numeric_names;
  out.categorical_names = categorical_names;
  out.class_names = class_names;
  for (std::size_t idx : indices) {
    out.numeric.push_back(numeric.at(idx));
    out.categorical.push_back(categorical.at(idx));
    out.labels.push_back(labels.at(idx));
  }
  out.report.rows_read = out.report.rows_kept = indices.size();
  return out;
}

RawTable load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path.string());

  std::vector<std::string> header = schema.column_names;
  std::string line;
  if (header.empty()) {
    if (!std::getline(in, line)) throw DataError(path.string() + ": missing header row");
    header = split_csv_line(line);
  }
  {
    std::set<std::string> seen;
    for (const auto& name : header)
      if (!seen.insert(name).second)
        throw DataError(path.string() + ": duplicate column name '" + name + "'");
  }
  const auto label_it = std::find(header.begin(), header.end(), schema.label_column);
  if (label_it == header.end())
    throw DataError(path.string() + ": label column '" + schema.label_column + "' not found");
  const std::size_t label_col = static_cast<std::size_t>(label_it - header.begin());
  for (const auto& cat : schema.categorical_columns)
    if (!contains(header, cat))
      throw DataError(path.string() + ": categorical column '" + cat + "' not found");

  RawTable table;
  std::vector<std::size_t> numeric_cols, categorical_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == label_col || contains(schema.drop_columns, header[c])) continue;
    if (contains(schema.categorical_columns, header[c])) {
      categorical_cols.push_back(c);
      table.categorical_names.push_back(header[c]);
    } else {
      numeric_cols.push_back(c);
      table.numeric_names.push_back(header[c]);
    }
  }

  IngestReport& report = table.report;
  std::vector<std::string> raw_labels;
  auto drop = [&report](const std::string& reason) {
    ++report.dropped;
    ++report.drop_reasons[reason];
  };
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++report.rows_read;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      drop("field_count");
      continue;
    }
    if (fields[label_col].empty()) {
      drop("missing_label");
      continue;
    }
    if (!schema.label_mapping.empty() && !schema.label_mapping.contains(fields[label_col])) {
      drop("unmapped_label");
      continue;
    }
    std::vector<double> numeric;
    numeric.reserve(numeric_cols.size());
    bool ok = true;
    for (std::size_t c : numeric_cols) {
      const auto value = parse_double(fields[c]);
      if (!value) {
        drop("unparseable_numeric");
        ok = false;
        break;
      }
      if (!std::isfinite(*value)) {
        drop("non_finite");
        ok = false;
        break;
      }
      numeric.push_back(*value);
    }
    if (!ok) continue;
    std::vector<std::string> categorical;
    categorical.reserve(categorical_cols.size());
    for (std::size_t c : categorical_cols) categorical.push_back(fields[c]);
    table.numeric.push_back(std::move(numeric));
    table.categorical.push_back(std::move(categorical));
    raw_labels.push_back(fields[label_col]);
  }
  if (raw_labels.empty()) throw DataError(path.string() + ": no rows survived ingestion");

  if (schema.label_mapping.empty() && schema.class_names.empty()) {
    std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
    table.class_names.assign(distinct.begin(), distinct.end());
    for (const auto& raw : raw_labels)
      table.labels.push_back(static_cast<std::size_t>(
          std::lower_bound(table.class_names.begin(), table.class_names.end(), raw) -
          table.class_names.begin()));
  } else if (schema.label_mapping.empty()) {
    // Raw labels are the class names themselves.
    table.class_names = schema.class_names;
    std::vector<std::vector<double>> numeric;
    std::vector<std::vector<std::string>> categorical;
    for (std::size_t r = 0; r < raw_labels.size(); ++r) {
      const auto it = std::find(schema.class_names.begin(), schema.class_names.end(), raw_labels[r]);
      if (it == schema.class_names.end()) {
        drop("unmapped_label");
        continue;
      }
      table.labels.push_back(static_cast<std::size_t>(it - schema.class_names.begin()));
      numeric.push_back(std::move(table.numeric[r]));
      categorical.push_back(std::move(table.categorical[r]));
    }
    table.numeric = std::move(numeric);
    table.categorical = std::move(categorical);
    if (table.labels.empty()) throw DataError(path.string() + ": no rows survived ingestion");
  } else {
    std::size_t n_classes = 0;
    for (const auto& [raw, index] : schema.label_mapping) n_classes = std::max(n_classes, index + 1);
    table.class_names = schema.class_names;
    if (table.class_names.empty()) {
      table.class_names.resize(n_classes);
      for (const auto& [raw, index] : schema.label_mapping)
        if (table.class_names[index].empty()) table.class_names[index] = raw;
    }
    for (const auto& raw : raw_labels) table.labels.push_back(schema.label_mapping.at(raw));
  }
  report.rows_kept = table.labels.size();
  return table;
}

// ---------------------------------------------------------------------------
// Preprocessing

Preprocessor Preprocessor::fit(const RawTable& train) {
  if (train.rows() == 0) throw DataError("cannot fit preprocessing on an empty table");
  Preprocessor p;
  p.numeric_names_ = train.numeric_names;
  p.categorical_names_ = train.categorical_names;
  p.numeric_ranges_.assign(train.numeric_names.size(),
                           {std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity()});
  std::vector<std::set<std::string>> vocab(train.categorical_names.size());
  for (std::size_t r = 0; r < train.rows(); ++r) {
    for (std::size_t c = 0; c < train.numeric_names.size(); ++c) {
      p.numeric_ranges_[c].min = std::min(p.numeric_ranges_[c].min, train.numeric[r][c]);
      p.numeric_ranges_[c].max = std::max(p.numeric_ranges_[c].max, train.numeric[r][c]);
    }
    for (std::size_t c = 0; c < train.categorical_names.size(); ++c)
      vocab[c].insert(train.categorical[r][c]);
  }
  p.output_names_ = train.numeric_names;
  for (std::size_t c = 0; c < train.numeric_names.size(); ++c)
    if (p.numeric_ranges_[c].max <= p.numeric_ranges_[c].min)
      p.constant_columns_.push_back(train.numeric_names[c]);
  for (std::size_t c = 0; c < train.categorical_names.size(); ++c) {
    p.vocab_.emplace_back(vocab[c].begin(), vocab[c].end());
    for (const auto& value : p.vocab_.back())
      p.output_names_.push_back(train.categorical_names[c] + "_" + value);
  }
  std::set<std::string> seen;
  for (const auto& name : p.output_names_)
    if (!seen.insert(name).second)
      throw DataError("one-hot expansion produced duplicate feature name '" + name + "'");
  return p;
}

Dataset Preprocessor::apply(const RawTable& table, IngestReport* report) const {
  if (table.numeric_names != numeric_names_ || table.categorical_names != categorical_names_)
    throw DataError("table columns differ from the ones preprocessing was fitted on");
  Dataset ds;
  ds.feature_names = output_names_;
  ds.class_names = table.class_names;
  ds.labels = table.labels;
  ds.normalization = numeric_ranges_;
  for (std::size_t i = numeric_names_.size(); i < output_names_.size(); ++i)
    ds.normalization.push_back({0.0, 1.0});
  ds.features.reserve(table.rows() * output_names_.size());
  std::size_t clipped = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < numeric_names_.size(); ++c) {
      const FeatureRange& range = numeric_ranges_[c];
      const double span = range.max - range.min;
      double v = span > 0.0 ? (table.numeric[r][c] - range.min) / span : 0.0;
      if (v < 0.0 || v > 1.0) {
        ++clipped;
        v = std::clamp(v, 0.0, 1.0);
      }
      ds.features.push_back(v);
    }
    for (std::size_t c = 0; c < categorical_names_.size(); ++c) {
      // Categories unseen during fitting encode as all zeros.
      for (const auto& value : vocab_[c])
        ds.features.push_back(table.categorical[r][c] == value ? 1.0 : 0.0);
    }
  }
  if (report) {
    report->constant_columns = constant_columns_;
    report->clipped_values += clipped;
  }
  ds.validate();
  return ds;
}

Dataset preprocess(const RawTable& raw, IngestReport* report) {
  return Preprocessor::fit(raw).apply(raw, report);
}

std::vector<FeatureRange> fit_ranges(const Dataset& ds) {
  std::vector<FeatureRange> ranges(ds.cols(), {std::numeric_limits<double>::infinity(),
                                               -std::numeric_limits<double>::infinity()});
  for (std::size_t r = 0; r < ds.rows(); ++r)
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      ranges[c].min = std::min(ranges[c].min, ds.at(r, c));
      ranges[c].max = std::max(ranges[c].max, ds.at(r, c));
    }
  return ranges;
}

Dataset scale_like(const Dataset& ds, const std::vector<FeatureRange>& ranges,
                   std::size_t* clipped) {
  if (ranges.size() != ds.cols()) throw ShapeError("range table does not match feature count");
  Dataset out = ds;
  out.normalization = ranges;
  std::size_t n_clipped = 0;
  for (std::size_t r = 0; r < ds.rows(); ++r)
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      const double span = ranges[c].max - ranges[c].min;
      double v = span > 0.0 ? (ds.at(r, c) - ranges[c].min) / span : 0.0;
      if (v < 0.0 || v > 1.0) {
        ++n_clipped;
        v = std::clamp(v, 0.0, 1.0);
      }
      out.features[r * ds.cols() + c] = v;
    }
  if (clipped) *clipped = n_clipped;
  return out;
}

// ---------------------------------------------------------------------------
// Splitting

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::span<const std::size_t> labels, std::span<const std::string> class_names, double ratio,
    std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("split ratio must lie in (0, 1)");
  std::size_t n_classes = class_names.size();
  for (std::size_t label : labels) n_classes = std::max(n_classes, label + 1);
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::vector<std::size_t> first, second;
  for (std::size_t k = 0; k < n_classes; ++k) {
    auto& members = by_class[k];
    if (members.empty()) continue;
    if (members.size() < 2) {
      const std::string name = k < class_names.size() ? class_names[k] : std::to_string(k);
      throw DataError("class '" + name + "' has fewer than 2 samples and cannot be stratified");
    }
    Rng rng(derive_seed(seed, k));
    shuffle(members, rng);
    auto take = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(members.size())));
    take = std::clamp<std::size_t>(take, 1, members.size() - 1);
    first.insert(first.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
    second.insert(second.end(), members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {first, second};
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double ratio, std::uint64_t seed) {
  const auto [a, b] = split_indices(ds.labels, ds.class_names, ratio, seed);
  return {ds.subset(a), ds.subset(b)};
}

std::pair<RawTable, RawTable> split(const RawTable& table, double ratio, std::uint64_t seed) {
  const auto [a, b] = split_indices(table.labels, table.class_names, ratio, seed);
  return {table.subset(a), table.subset(b)};
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& name : ds.feature_names) out << csv_escape(name) << ',';
  out << "label\n";
  char buf[64];
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, ds.at(r, c));
      out.write(buf, res.ptr - buf);
      out << ',';
    }
    out << csv_escape(ds.class_names.at(ds.labels[r])) << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace xaieval::data
