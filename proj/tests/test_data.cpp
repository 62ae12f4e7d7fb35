#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"
#include "xaieval/data/dataset.hpp"
#include "xaieval/data/synth.hpp"
#include "xaieval/nn/train.hpp"

using namespace xaieval;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("xaieval_data_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

data::DatasetSchema simple_schema() {
  data::DatasetSchema s;
  s.label_column = "label";
  return s;
}

}  // namespace

TEST_CASE("load_csv: malformed row is dropped and counted") {
  TempDir dir;
  const auto path = dir.write("toy.csv",
                              "a,b,label\n"
                              "1,2,x\n"
                              "3,oops,y\n"
                              "5,6,x\n"
                              "7,8,y\n"
                              "9,10,x\n");
  const auto raw = data::load_csv(path, simple_schema());
  CHECK(raw.rows() == 4);
  CHECK(raw.report.dropped == 1);
  CHECK(raw.report.drop_reasons.at("unparseable_numeric") == 1);
  CHECK(raw.report.rows_read == 5);
  CHECK(raw.class_names == std::vector<std::string>{"x", "y"});
  CHECK(raw.labels == std::vector<std::size_t>{0, 0, 1, 0});
}

TEST_CASE("load_csv: missing labels, field counts and label mapping") {
  TempDir dir;
  const auto path = dir.write("toy.csv",
                              "a,label\n"
                              "1,\n"
                              "2,x,extra\n"
                              "3,benign\n"
                              "4,dos\n"
                              "5,unknown\n");
  auto schema = simple_schema();
  schema.label_mapping = {{"benign", 0}, {"dos", 1}};
  schema.class_names = {"Normal", "DoS"};
  const auto raw = data::load_csv(path, schema);
  CHECK(raw.rows() == 2);
  CHECK(raw.report.drop_reasons.at("missing_label") == 1);
  CHECK(raw.report.drop_reasons.at("field_count") == 1);
  CHECK(raw.report.drop_reasons.at("unmapped_label") == 1);
  CHECK(raw.class_names == std::vector<std::string>{"Normal", "DoS"});
  CHECK(raw.report.to_json()["dropped"] == 3);
}

TEST_CASE("load_csv: hard errors") {
  TempDir dir;
  CHECK_THROWS_AS(data::load_csv(dir.path / "absent.csv", simple_schema()), DataError);
  const auto dup = dir.write("dup.csv", "a,a,label\n1,2,x\n");
  CHECK_THROWS_WITH_AS(data::load_csv(dup, simple_schema()), doctest::Contains("duplicate"), DataError);
  const auto nolabel = dir.write("nolabel.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(data::load_csv(nolabel, simple_schema()), DataError);
  const auto allbad = dir.write("allbad.csv", "a,label\nz,x\n");
  CHECK_THROWS_WITH_AS(data::load_csv(allbad, simple_schema()), doctest::Contains("no rows"), DataError);
  auto bad_schema = simple_schema();
  bad_schema.categorical_columns = {"label"};
  CHECK_THROWS_AS(bad_schema.validate(), DataError);
}

TEST_CASE("load_csv: NSL-KDD shaped file expands categoricals to one-hot names") {
  TempDir dir;
  const auto path = dir.path / "kdd.csv";
  data::write_nslkdd_like_csv(path, 600, 3);
  const auto raw = data::load_csv(path, data::nslkdd_schema(false));
  CHECK(raw.class_names.size() == 5);
  const auto ds = data::preprocess(raw);
  CHECK(ds.feature_index("flag_S0").has_value());
  CHECK(ds.feature_index("protocol_type_tcp").has_value());
  CHECK(ds.feature_index("service_http").has_value());
  CHECK_FALSE(ds.feature_index("difficulty").has_value());
  CHECK_FALSE(ds.feature_index("flag").has_value());
  // One-hot: each categorical value lights exactly one indicator.
  std::vector<std::size_t> flag_cols;
  for (std::size_t c = 0; c < ds.cols(); ++c)
    if (ds.feature_names[c].rfind("flag_", 0) == 0) flag_cols.push_back(c);
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    double total = 0.0;
    for (std::size_t c : flag_cols) total += ds.at(r, c);
    CHECK(total == 1.0);
  }
}

TEST_CASE("load_csv: headerless file with schema-supplied column names") {
  TempDir dir;
  const auto path = dir.path / "with_header.csv";
  data::write_nslkdd_like_csv(path, 50, 4);
  std::ifstream in(path);
  std::string header, rest, line;
  std::getline(in, header);
  while (std::getline(in, line)) rest += line + "\n";
  const auto headerless = dir.write("KDDTrain+.txt", rest);
  const auto a = data::load_csv(path, data::nslkdd_schema(false));
  const auto b = data::load_csv(headerless, data::nslkdd_schema(true));
  CHECK(a.rows() == b.rows());
  CHECK(a.labels == b.labels);
  CHECK(a.numeric == b.numeric);
}

TEST_CASE("preprocess: min-max scaling, constant columns and clipping") {
  TempDir dir;
  const auto path = dir.write("t.csv",
                              "v,k,label\n"
                              "0,3,a\n10,3,b\n5,3,a\n2,3,b\n");
  const auto raw = data::load_csv(path, simple_schema());
  data::IngestReport report;
  const auto ds = data::preprocess(raw, &report);
  CHECK(ds.at(2, 0) == 0.5);
  CHECK(ds.at(0, 1) == 0.0);
  CHECK(report.constant_columns == std::vector<std::string>{"k"});

  // Scaling oracle on a held-out table: value 15 with train range [0,10]
  // maps to 1.5 and clips to 1; -5 maps to -0.5 and clips to 0.
  const auto test_path = dir.write("test.csv", "v,k,label\n15,3,a\n-5,3,b\n7.5,3,a\n");
  const auto test_raw = data::load_csv(test_path, simple_schema());
  const auto pre = data::Preprocessor::fit(raw);
  data::IngestReport test_report;
  const auto test_ds = pre.apply(test_raw, &test_report);
  auto oracle = [](double v) { return std::clamp((v - 0.0) / 10.0, 0.0, 1.0); };
  CHECK(test_ds.at(0, 0) == oracle(15));
  CHECK(test_ds.at(1, 0) == oracle(-5));
  CHECK(test_ds.at(2, 0) == oracle(7.5));
  CHECK(test_report.clipped_values == 2);
}

TEST_CASE("preprocess: every value lies in [0,1] and is finite") {
  TempDir dir;
  const auto path = dir.path / "kdd.csv";
  data::write_nslkdd_like_csv(path, 1000, 9);
  const auto raw = data::load_csv(path, data::nslkdd_schema(false));
  const auto [train_raw, test_raw] = data::split(raw, 0.7, 2);
  const auto pre = data::Preprocessor::fit(train_raw);
  for (const auto& ds : {pre.apply(train_raw), pre.apply(test_raw)})
    for (double v : ds.features) CHECK((std::isfinite(v) && v >= 0.0 && v <= 1.0));
}

TEST_CASE("split: stratified, deterministic, disjoint and exhaustive") {
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    Rng rng(trial);
    data::Dataset ds;
    const std::size_t n = 20 + uniform_index(rng, 200), k = 2 + uniform_index(rng, 4);
    ds.feature_names = {"x"};
    for (std::size_t c = 0; c < k; ++c) ds.class_names.push_back("c" + std::to_string(c));
    for (std::size_t r = 0; r < n; ++r) {
      ds.features.push_back(uniform01(rng));
      ds.labels.push_back(r < 2 * k ? r % k : uniform_index(rng, k));
    }
    const double ratio = 0.2 + 0.6 * uniform01(rng);
    const auto [a1, b1] = data::split_indices(ds.labels, ds.class_names, ratio, trial);
    const auto [a2, b2] = data::split_indices(ds.labels, ds.class_names, ratio, trial);
    CHECK(a1 == a2);
    CHECK(b1 == b2);
    std::set<std::size_t> all(a1.begin(), a1.end());
    for (std::size_t i : b1) CHECK(all.insert(i).second);
    CHECK(all.size() == n);
    const auto counts = ds.class_counts();
    for (std::size_t c = 0; c < k; ++c) {
      const auto in_first = std::count_if(a1.begin(), a1.end(), [&](std::size_t i) { return ds.labels[i] == c; });
      CHECK(std::abs(static_cast<double>(in_first) - ratio * static_cast<double>(counts[c])) <= 1.0);
    }
  }
}

TEST_CASE("split: 100 samples at 0.7 and classes too small to stratify") {
  const auto ds = data::synthesize({.n = 100, .d = 2}, 4);
  const auto [train, test] = data::split(ds, 0.7, 5);
  CHECK(train.rows() + test.rows() == 100);
  CHECK(std::abs(static_cast<double>(train.rows()) - 70.0) <= 2.0);
  data::Dataset tiny = ds;
  tiny.class_names.push_back("rare");
  tiny.labels[0] = 2;
  CHECK_THROWS_WITH_AS(data::split(tiny, 0.7, 1), doctest::Contains("rare"), DataError);
  CHECK_THROWS_AS(data::split(ds, 1.0, 1), InvalidArgument);
}

TEST_CASE("write_csv then load and preprocess reproduces a normalized dataset") {
  TempDir dir;
  const auto path = dir.path / "kdd.csv";
  data::write_nslkdd_like_csv(path, 300, 5);
  const auto ds = data::preprocess(data::load_csv(path, data::nslkdd_schema(false)));
  const auto out = dir.path / "roundtrip.csv";
  data::write_csv(ds, out);
  data::DatasetSchema schema;
  schema.label_column = "label";
  schema.class_names = ds.class_names;
  const auto back = data::preprocess(data::load_csv(out, schema));
  CHECK(back.feature_names == ds.feature_names);
  CHECK(back.labels == ds.labels);
  REQUIRE(back.features.size() == ds.features.size());
  for (std::size_t i = 0; i < ds.features.size(); ++i) {
    // Constant columns were already 0; every other column spans [0,1].
    CHECK(back.features[i] == doctest::Approx(ds.features[i]).epsilon(1e-12));
  }
}

TEST_CASE("synthesize: threshold, linear and xor rules") {
  const auto t = data::synthesize({.n = 1000, .d = 5}, 1);
  for (std::size_t r = 0; r < t.rows(); ++r) CHECK(t.labels[r] == (t.at(r, 0) > 0.5 ? 1u : 0u));
  CHECK(data::SyntheticSpec{.n = 10, .d = 5}.informative_features() == std::vector<std::size_t>{0});

  data::SyntheticSpec lin{.n = 500, .d = 6, .rule = data::SyntheticRule::Linear,
                          .weights = {0, 1.5, 0, -2, 0, 0}};
  CHECK(lin.informative_features() == std::vector<std::size_t>{1, 3});
  const auto l = data::synthesize(lin, 2);
  const auto counts = l.class_counts();
  CHECK(counts[0] == 250);

  const auto a = data::synthesize({.n = 200, .d = 3}, 7);
  const auto b = data::synthesize({.n = 200, .d = 3}, 7);
  CHECK(a.features == b.features);

  CHECK_THROWS_AS(data::synthesize({.n = 10, .d = 3, .feature = 3}, 1), InvalidArgument);
  CHECK_THROWS_AS(data::synthesize({.n = 10, .d = 3, .rule = data::SyntheticRule::Linear}, 1), InvalidArgument);
  CHECK_THROWS_AS(data::synthesize({.n = 10, .d = 1, .rule = data::SyntheticRule::Xor}, 1), InvalidArgument);
}

TEST_CASE("synthesize: xor defeats a linear probe but not a ReLU net") {
  const auto ds = data::synthesize({.n = 3000, .d = 2, .rule = data::SyntheticRule::Xor}, 13);
  const auto [train_set, test_set] = data::split(ds, 0.7, 1);
  nn::TrainConfig cfg;
  cfg.learning_rate = 0.02;
  cfg.max_epochs = 600;
  cfg.early_stop_patience = 40;
  cfg.batch_size = 64;
  cfg.seed = 3;
  const auto probe = nn::train(train_set, {{}}, cfg);
  CHECK(std::abs(nn::accuracy(probe, test_set) - 0.5) <= 0.1);
  const auto net = nn::train(train_set, {{16, 16}}, cfg);
  CHECK(nn::accuracy(net, test_set) > 0.95);
}

TEST_CASE("inject_robustness_columns: biased labels and unrelated column") {
  // A bimodal feature (mass near 0 and near 1, like flag indicators) so a
  // threshold label can be almost perfectly correlated with it. For a
  // uniform feature the best threshold label reaches only sqrt(3)/2.
  Rng rng(5);
  data::Dataset ds = data::synthesize({.n = 1000, .d = 4}, 6);
  for (std::size_t r = 0; r < ds.rows(); ++r)
    ds.features[r * 4 + 2] = uniform01(rng) < 0.4 ? 0.05 * uniform01(rng) : 1.0 - 0.05 * uniform01(rng);

  const auto out = data::inject_robustness_columns(ds, "f2", 77);
  std::vector<double> feature(ds.rows()), labels(ds.rows()), unrelated(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    feature[r] = ds.at(r, 2);
    labels[r] = static_cast<double>(out.biased.labels[r]);
    unrelated[r] = out.adversarial.at(r, out.unrelated_index);
  }
  CHECK(std::abs(data::pearson(feature, labels)) >= 0.95);
  CHECK(out.adversarial.cols() == ds.cols() + 1);
  CHECK(out.adversarial.feature_names.back() == "unrelated");
  CHECK(std::abs(data::pearson(unrelated, labels)) <= 0.1);
  for (double v : unrelated) CHECK((v >= 0.0 && v < 1.0));

  const auto again = data::inject_robustness_columns(ds, "f2", 77);
  CHECK(again.adversarial.features == out.adversarial.features);
  CHECK_THROWS_AS(data::inject_robustness_columns(ds, "nope", 1), InvalidArgument);

  data::RobustnessColumns constant;
  constant.mode = data::UnrelatedColumn::Constant;
  const auto c = data::inject_robustness_columns(ds, "f2", 77, constant);
  for (std::size_t r = 0; r < ds.rows(); ++r) CHECK(c.adversarial.at(r, c.unrelated_index) == 0.0);
}

TEST_CASE("inject_robustness_columns: uniform feature correlation ceiling") {
  const auto ds = data::synthesize({.n = 4000, .d = 3}, 8);
  const auto out = data::inject_robustness_columns(ds, "f1", 1);
  std::vector<double> feature(ds.rows()), labels(ds.rows());
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    feature[r] = ds.at(r, 1);
    labels[r] = static_cast<double>(out.biased.labels[r]);
  }
  CHECK(data::pearson(feature, labels) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(0.02));
}
