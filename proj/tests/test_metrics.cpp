#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support.hpp"
#include "xaieval/core/error.hpp"
#include "xaieval/data/synth.hpp"
#include "xaieval/metrics/common.hpp"
#include "xaieval/metrics/completeness.hpp"
#include "xaieval/metrics/descriptive_accuracy.hpp"
#include "xaieval/metrics/efficiency.hpp"
#include "xaieval/metrics/report.hpp"
#include "xaieval/metrics/robustness.hpp"
#include "xaieval/metrics/sparsity.hpp"
#include "xaieval/metrics/stability.hpp"
#include "xaieval/nn/train.hpp"

using namespace xaieval;
using attribution::Method;

namespace {

struct Fixture {
  data::Dataset train, test;
  nn::Architecture arch{{16}};
  nn::TrainConfig cfg;
  nn::DenseNetwork net;
  attribution::AttributionSettings settings;
};

// Threshold task on x0 over six features, trained once for the whole file.
const Fixture& threshold_fixture() {
  static const Fixture f = [] {
    Fixture f;
    const auto ds = data::synthesize({.n = 1500, .d = 6}, 21);
    std::tie(f.train, f.test) = data::split(ds, 0.7, 1);
    f.cfg.learning_rate = 0.01;
    f.cfg.max_epochs = 300;
    f.cfg.batch_size = 64;
    f.cfg.seed = 4;
    f.net = nn::train(f.train, f.arch, f.cfg);
    return f;
  }();
  return f;
}

// class 1 iff x0 > 0.5 (the tie at 0.5 goes to class 0).
nn::DenseNetwork threshold_model(std::size_t d) {
  std::vector<std::vector<double>> w(2, std::vector<double>(d, 0.0));
  w[1][0] = 1.0;
  return testing::linear_network(w, {0.0, -0.5});
}

nn::DenseNetwork constant_model(std::size_t d) {
  return testing::linear_network(std::vector<std::vector<double>>(2, std::vector<double>(d, 0.0)), {0.0, 0.0});
}

attribution::FeatureRanking ranking_of(std::vector<double> raw) {
  const auto names = nn::default_feature_names(raw.size());
  return attribution::make_ranking(names, raw, Method::IG, attribution::Aggregation::Absolute, 1);
}

}  // namespace

TEST_CASE("sparsity: direct formula on a single dominant feature") {
  const auto curve = metrics::sparsity(ranking_of({1.0, 0.0, 0.0, 0.0}), metrics::default_thresholds());
  REQUIRE(curve.size() == 11);
  CHECK(curve.front().threshold == 0.0);
  CHECK(curve.front().sparsity == 0.75);
  CHECK(curve.back().threshold == 1.0);
  CHECK(curve.back().sparsity == 1.0);
}

TEST_CASE("sparsity: all-equal scores are 0 below 1 and 1 at 1") {
  const auto curve = metrics::sparsity(ranking_of({2.0, 2.0, 2.0}), metrics::default_thresholds());
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) CHECK(curve[i].sparsity == 0.0);
  CHECK(curve.back().sparsity == 1.0);
}

TEST_CASE("sparsity: monotone and ends at exactly one on random rankings") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> raw(1 + uniform_index(rng, 40));
    for (double& v : raw) v = uniform01(rng) * 10.0;
    const auto curve = metrics::sparsity(ranking_of(raw), metrics::default_thresholds());
    for (std::size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i].threshold > curve[i - 1].threshold);
      CHECK(curve[i].sparsity >= curve[i - 1].sparsity);
    }
    CHECK(curve.back().sparsity == 1.0);
  }
}

TEST_CASE("sparsity: rejects empty rankings and unordered thresholds") {
  attribution::FeatureRanking empty;
  const auto t = metrics::default_thresholds();
  CHECK_THROWS_AS(metrics::sparsity(empty, t), InvalidArgument);
  const std::vector<double> bad = {0.5, 0.2};
  CHECK_THROWS_AS(metrics::sparsity(ranking_of({1.0, 0.0}), bad), InvalidArgument);
}

TEST_CASE("stability score: identical runs give 1, disjoint runs give 0") {
  const std::vector<std::vector<std::string>> same = {{"a", "b", "c"}, {"c", "a", "b"}, {"b", "c", "a"}};
  std::vector<std::string> common;
  CHECK(metrics::stability_score(same, 3, &common) == 1.0);
  CHECK(common == std::vector<std::string>{"a", "b", "c"});
  const std::vector<std::vector<std::string>> disjoint = {{"a", "b"}, {"c", "d"}, {"e", "f"}};
  CHECK(metrics::stability_score(disjoint, 2, &common) == 0.0);
  CHECK(common.empty());
  const std::vector<std::vector<std::string>> partial = {{"a", "b", "x"}, {"b", "a", "y"}};
  CHECK(metrics::stability_score(partial, 3) == doctest::Approx(2.0 / 3.0));
  // Only the first top_k entries of each run count.
  CHECK(metrics::stability_score({{"a", "b"}, {"b", "a"}}, 1) == 0.0);
}

TEST_CASE("stability: fixed pipeline reproduces 1.0 for every method and scope") {
  const auto& f = threshold_fixture();
  for (Method m : attribution::kAllMethods)
    for (auto scope : {metrics::StabilityScope::Global, metrics::StabilityScope::Local}) {
      metrics::StabilityConfig sc;
      sc.scope = scope;
      sc.mode = metrics::StabilityMode::Fixed;
      sc.top_k = 3;
      const auto r = metrics::stability(f.train, f.test, f.arch, f.cfg, f.net, m, f.settings, sc, 9);
      CHECK(r.score == 1.0);
      CHECK(r.intersection.size() == 3);
      CHECK(r.runs.size() == 3);
    }
}

TEST_CASE("stability: resampled batches stay in [0,1] and list the intersection") {
  const auto ds = data::synthesize({.n = 800, .d = 20, .rule = data::SyntheticRule::Linear,
                                    .weights = std::vector<double>(20, 1.0)},
                                   3);
  const auto [train, test] = data::split(ds, 0.7, 2);
  nn::TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 60;
  cfg.batch_size = 64;
  const auto net = nn::train(train, {{8}}, cfg);
  attribution::AttributionSettings settings;
  settings.global_samples = 50;
  metrics::StabilityConfig sc;
  sc.top_k = 5;
  const auto r = metrics::stability(train, test, {{8}}, cfg, net, Method::LRP, settings, sc, 17);
  CHECK(r.score >= 0.0);
  CHECK(r.score <= 1.0);
  CHECK(r.intersection.size() == static_cast<std::size_t>(std::lround(r.score * 5)));
  for (const auto& name : r.intersection)
    for (const auto& run : r.runs) CHECK(std::find(run.begin(), run.end(), name) != run.end());
}

TEST_CASE("stability: argument errors") {
  const auto& f = threshold_fixture();
  metrics::StabilityConfig sc;
  sc.top_k = 7;
  CHECK_THROWS_AS(metrics::stability(f.train, f.test, f.arch, f.cfg, f.net, Method::IG, f.settings, sc, 1),
                  InvalidArgument);
  sc.top_k = 2;
  sc.n_runs = 1;
  CHECK_THROWS_AS(metrics::stability(f.train, f.test, f.arch, f.cfg, f.net, Method::IG, f.settings, sc, 1),
                  InvalidArgument);
}

TEST_CASE("descriptive accuracy: default k list is capped below d") {
  CHECK(metrics::default_k_list(100) == std::vector<std::size_t>{0, 5, 10, 25, 50, 70});
  CHECK(metrics::default_k_list(30) == std::vector<std::size_t>{0, 5, 10, 25, 29});
  CHECK(metrics::default_k_list(6) == std::vector<std::size_t>{0, 5});
  CHECK(metrics::default_k_list(1) == std::vector<std::size_t>{0});
}

TEST_CASE("descriptive accuracy: removing the informative feature falls to the majority rate") {
  const auto& f = threshold_fixture();
  const auto params = f.settings.resolve(f.train);
  const auto ranking = metrics::rank_features(f.net, f.test, Method::IG, params, f.settings, 3);
  REQUIRE(ranking.entries[0].feature == "f0");
  metrics::DescriptiveAccuracyConfig dc;
  dc.k_list = {0, 1};
  const auto r = metrics::descriptive_accuracy(f.train, f.test, f.arch, f.cfg, f.net, ranking, dc);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].k == 0);
  CHECK(r.points[0].accuracy == nn::accuracy(f.net, f.test));
  CHECK(r.points[0].accuracy > 0.95);
  CHECK(r.points[1].removed == std::vector<std::string>{"f0"});
  // Majority-class oracle computed here from the raw labels.
  std::size_t ones = std::count(f.train.labels.begin(), f.train.labels.end(), 1u);
  const std::size_t majority = 2 * ones > f.train.rows() ? 1 : 0;
  const double oracle = static_cast<double>(std::count(f.test.labels.begin(), f.test.labels.end(), majority)) /
                        static_cast<double>(f.test.rows());
  CHECK(r.majority_rate == oracle);
  CHECK(std::abs(r.points[1].accuracy - oracle) <= 0.03);
}

TEST_CASE("descriptive accuracy: removing zero-importance features keeps accuracy") {
  const auto& f = threshold_fixture();
  // Ranking that puts the uninformative columns first.
  const auto ranking = ranking_of({0.0, 5.0, 4.0, 3.0, 2.0, 1.0});
  metrics::DescriptiveAccuracyConfig dc;
  dc.k_list = {0, 3, 5};
  const auto r = metrics::descriptive_accuracy(f.train, f.test, f.arch, f.cfg, f.net, ranking, dc);
  for (const auto& p : r.points) CHECK(std::abs(p.accuracy - r.points[0].accuracy) <= 0.02);
  CHECK(r.points[2].removed == std::vector<std::string>{"f1", "f2", "f3", "f4", "f5"});
}

TEST_CASE("descriptive accuracy: parallel retraining matches the sequential run") {
  const auto& f = threshold_fixture();
  const auto ranking = ranking_of({6, 5, 4, 3, 2, 1});
  metrics::DescriptiveAccuracyConfig dc;
  dc.k_list = {0, 1, 2};
  const auto serial = metrics::descriptive_accuracy(f.train, f.test, f.arch, f.cfg, f.net, ranking, dc);
  dc.parallel = true;
  const auto parallel = metrics::descriptive_accuracy(f.train, f.test, f.arch, f.cfg, f.net, ranking, dc);
  CHECK(serial.to_json() == parallel.to_json());
}

TEST_CASE("descriptive accuracy: mask mode zeroes columns without retraining") {
  const auto& f = threshold_fixture();
  metrics::DescriptiveAccuracyConfig dc;
  dc.k_list = {0, 2};
  dc.mode = metrics::RemovalMode::Mask;
  const auto r = metrics::descriptive_accuracy(f.train, f.test, f.arch, f.cfg, f.net, ranking_of({6, 5, 4, 3, 2, 1}), dc);
  auto masked = f.test;
  for (std::size_t row = 0; row < masked.rows(); ++row) masked.row(row)[0] = masked.row(row)[1] = 0.0;
  CHECK(r.points[1].accuracy == nn::accuracy(f.net, masked));
}

TEST_CASE("descriptive accuracy: k lists that remove every feature are rejected") {
  const auto& f = threshold_fixture();
  const auto ranking = ranking_of({6, 5, 4, 3, 2, 1});
  metrics::DescriptiveAccuracyConfig dc;
  dc.k_list = {0, 6};
  CHECK_THROWS_AS(metrics::descriptive_accuracy(f.train, f.test, f.arch, f.cfg, f.net, ranking, dc),
                  InvalidArgument);
  dc.k_list = {1, 2};
  CHECK_THROWS_AS(metrics::descriptive_accuracy(f.train, f.test, f.arch, f.cfg, f.net, ranking, dc),
                  InvalidArgument);
}

TEST_CASE("efficiency: one row per count, non-negative timings, oversized counts flagged") {
  const auto& f = threshold_fixture();
  const auto params = f.settings.resolve(f.train);
  metrics::EfficiencyConfig ec;
  ec.counts = {1, 100, 2000};
  const auto r = metrics::efficiency(f.net, f.test, Method::LRP, params, ec, 5);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].label == "1 (Local)");
  CHECK(r.rows[1].label == "100");
  CHECK_FALSE(r.rows[1].with_replacement);
  CHECK(r.rows[2].with_replacement);
  for (const auto& row : r.rows) {
    CHECK(row.seconds.size() == 3);
    for (double s : row.seconds) CHECK(s >= 0.0);
    CHECK(row.median == metrics::median(row.seconds));
  }
  CHECK(r.to_json().dump().find("seconds") == std::string::npos);
}

TEST_CASE("efficiency: per-sample batch cost stays within 5x of the single-sample cost") {
  const auto& f = threshold_fixture();
  const auto params = f.settings.resolve(f.train);
  metrics::EfficiencyConfig ec;
  ec.counts = {1, 512};
  ec.repeats = 5;
  for (Method m : {Method::IG, Method::LRP}) {
    const auto r = metrics::efficiency(f.net, f.test, m, params, ec, 8, Execution::Serial);
    const double single = r.rows[0].median, batch = r.rows[1].median / 512.0;
    CHECK_MESSAGE(batch <= 5.0 * single, attribution::to_string(m));
  }
}

TEST_CASE("robustness: biased feature leads, constant unrelated column stays out of the top 3") {
  const auto& f = threshold_fixture();
  metrics::RobustnessConfig rc;
  rc.columns.mode = data::UnrelatedColumn::Constant;
  for (Method m : attribution::kAllMethods) {
    const auto r = metrics::robustness(f.train, f.test, f.arch, f.cfg, m, f.settings, "f0", rc, 13);
    CHECK(r.trial_rows.size() == 100);
    CHECK_MESSAGE(r.biased.shares[0].biased >= 95.0, attribution::to_string(m));
    if (m != Method::LRP) CHECK_MESSAGE(r.adversarial.unrelated_in_top <= 5.0, attribution::to_string(m));
    for (const auto* model : {&r.biased, &r.adversarial}) {
      CHECK(model->shares.size() == 3);
      for (const auto& s : model->shares) CHECK(s.biased + s.unrelated + s.other == doctest::Approx(100.0));
    }
    CHECK(r.biased.unrelated_in_top == 0.0);
  }
}

TEST_CASE("robustness: absent biased feature is rejected") {
  const auto& f = threshold_fixture();
  CHECK_THROWS_AS(metrics::robustness(f.train, f.test, f.arch, f.cfg, Method::IG, f.settings, "nope", {}, 1),
                  InvalidArgument);
}

TEST_CASE("completeness local: threshold model flips within six steps") {
  const auto net = threshold_model(3);
  const std::vector<double> x = {0.9, 0.3, 0.7};
  for (Method m : attribution::kAllMethods) {
    const auto t = metrics::completeness_local(net, x, m, {}, 2, 0.1, 7);
    CHECK(t.original_class == 1);
    CHECK(t.changed);
    CHECK(t.instance_id == 7);
    CHECK(t.features_touched == 1);
    CHECK(t.steps.size() <= 6);
    CHECK(t.steps.back().feature == "f0");
    CHECK(t.steps.back().value <= 0.5);
    CHECK(t.steps.back().new_class == 0);
  }
}

TEST_CASE("completeness local: constant classifier never changes and touches max_features") {
  const auto net = constant_model(4);
  const std::vector<double> x = {0.3, 0.1, 0.8, 0.25};
  const auto t = metrics::completeness_local(net, x, Method::DeepLift, {}, 2, 0.1);
  CHECK_FALSE(t.changed);
  CHECK(t.features_touched == 2);
  // 11 grid points per feature; 0.3 and 0.1 are skipped only if they are grid values.
  CHECK(t.steps.size() >= 20);
  CHECK(t.steps.size() <= 22);
}

TEST_CASE("completeness local: original value on the grid is skipped") {
  const auto net = constant_model(1);
  const std::vector<double> x = {0.5};
  const auto t = metrics::completeness_local(net, x, Method::IG, {}, 1, 0.25);
  std::vector<double> values;
  for (const auto& s : t.steps) values.push_back(s.value);
  CHECK(values == std::vector<double>{0.0, 0.25, 0.75, 1.0});
}

TEST_CASE("completeness local: a pinned feature stays at |original - 1| for the next sweep") {
  // Class 1 iff x0 + 2 x1 > 2.25. From x = (0.2, 0.55) the x0 sweep peaks at
  // 2.1; with x0 pinned at 0.8 the x1 sweep flips at 0.8, and without the pin
  // it could never flip.
  std::vector<std::vector<double>> w = {{0.0, 0.0}, {1.0, 2.0}};
  const auto net = testing::linear_network(w, {0.0, -2.25});
  const std::vector<double> x = {0.2, 0.55};
  attribution::AttributionParams params;
  const auto t = metrics::completeness_local(net, x, Method::IG, params, 2, 0.1);
  REQUIRE(t.original_class == 0);
  REQUIRE(t.changed);
  CHECK(t.features_touched == 2);
  CHECK(t.steps.back().feature == "f1");
  CHECK(t.steps.back().value == doctest::Approx(0.8));
}

TEST_CASE("completeness local: bad steps are rejected") {
  CHECK_THROWS_AS(metrics::sweep_grid(0.3), InvalidArgument);
  CHECK_THROWS_AS(metrics::sweep_grid(0.0), InvalidArgument);
  CHECK(metrics::sweep_grid(0.1).size() == 11);
  CHECK(metrics::sweep_grid(0.1).back() == 1.0);
}

TEST_CASE("completeness global: constant classifier scores 0% for every class") {
  const auto ds = data::synthesize({.n = 400, .d = 4}, 2);
  const auto net = constant_model(4);
  for (Method m : attribution::kAllMethods) {
    const auto r = metrics::completeness_global(net, ds, m, {}, {}, 3);
    REQUIRE(r.per_class.size() == 2);
    for (const auto& c : r.per_class) {
      CHECK(c.total == 100);
      CHECK(c.percent == 0.0);
    }
    CHECK(r.remaining.back() == 1.0);
  }
}

TEST_CASE("completeness global: threshold model scores 100% with one feature") {
  const auto ds = data::synthesize({.n = 600, .d = 5}, 4);
  const auto net = threshold_model(5);
  metrics::CompletenessConfig cc;
  cc.max_features = 1;
  for (Method m : attribution::kAllMethods) {
    const auto r = metrics::completeness_global(net, ds, m, {}, cc, 6);
    for (const auto& c : r.per_class) CHECK_MESSAGE(c.percent == 100.0, attribution::to_string(m));
    for (std::size_t s = 1; s < r.remaining.size(); ++s) CHECK(r.remaining[s] <= r.remaining[s - 1]);
    CHECK(r.remaining.front() == 1.0);
    CHECK(r.remaining.back() == 0.0);
  }
}

TEST_CASE("completeness global: more features never lowers the percentage") {
  const auto& f = threshold_fixture();
  const auto params = f.settings.resolve(f.train);
  for (Method m : attribution::kAllMethods) {
    std::vector<double> previous;
    for (std::size_t mf = 1; mf <= 3; ++mf) {
      metrics::CompletenessConfig cc;
      cc.max_features = mf;
      cc.batch_per_class = 40;
      const auto r = metrics::completeness_global(f.net, f.test, m, params, cc, 2);
      for (std::size_t k = 0; k < previous.size(); ++k) CHECK(r.per_class[k].percent >= previous[k]);
      previous.clear();
      for (const auto& c : r.per_class) {
        CHECK(c.percent >= 0.0);
        CHECK(c.percent <= 100.0);
        previous.push_back(c.percent);
      }
    }
  }
}

TEST_CASE("completeness global: parallel traces equal serial traces") {
  const auto& f = threshold_fixture();
  const auto params = f.settings.resolve(f.train);
  metrics::CompletenessConfig cc;
  cc.batch_per_class = 30;
  const auto a = metrics::completeness_global(f.net, f.test, Method::DeepLift, params, cc, 2, Execution::Serial);
  const auto b = metrics::completeness_global(f.net, f.test, Method::DeepLift, params, cc, 2, Execution::Parallel);
  CHECK(a.to_json() == b.to_json());
}

TEST_CASE("completeness global: missing class is an error") {
  const auto ds = data::synthesize({.n = 200, .d = 3}, 1);
  metrics::CompletenessConfig cc;
  cc.classes = {"class7"};
  CHECK_THROWS_AS(metrics::completeness_global(constant_model(3), ds, Method::IG, {}, cc, 1), DataError);
  auto only_zero = ds.subset(std::vector<std::size_t>{0});
  only_zero.labels[0] = 0;
  cc.classes = {"class1"};
  CHECK_THROWS_AS(metrics::completeness_global(constant_model(3), only_zero, Method::IG, {}, cc, 1), DataError);
}

TEST_CASE("report: json round trip and schema version check") {
  metrics::MetricReport r;
  r.metric = metrics::Metric::Sparsity;
  r.method = Method::DeepLift;
  r.dataset_id = "synthetic";
  r.seed = 77;
  r.config = {{"seed", 77}};
  r.payload = metrics::sparsity_payload(ranking_of({1, 0, 0, 0}),
                                        metrics::sparsity(ranking_of({1, 0, 0, 0}), metrics::default_thresholds()));
  const auto back = metrics::MetricReport::from_json(r.to_json());
  CHECK(back.to_json() == r.to_json());
  CHECK(back.file_stem() == "sparsity_deeplift");
  auto j = r.to_json();
  j["schema_version"] = 2;
  CHECK_THROWS_AS(metrics::MetricReport::from_json(j), DecodeError);
  j.erase("schema_version");
  CHECK_THROWS_AS(metrics::MetricReport::from_json(j), DecodeError);

  const auto csvs = metrics::report_csvs(r);
  REQUIRE(csvs.size() == 1);
  CHECK(csvs[0].second.rfind("threshold,sparsity\n0,0.75\n0.1,0.75\n", 0) == 0);
  CHECK(csvs[0].second.find("\n1,1\n") != std::string::npos);
}

TEST_CASE("report: metric names round trip in evaluation order") {
  std::vector<std::string> names;
  for (auto m : metrics::kAllMetrics) {
    names.push_back(metrics::to_string(m));
    CHECK(metrics::metric_from_string(names.back()) == m);
  }
  CHECK(names == std::vector<std::string>{"descriptive_accuracy", "sparsity", "efficiency", "stability",
                                          "robustness", "completeness"});
  CHECK_THROWS_AS(metrics::metric_from_string("all"), InvalidArgument);
}
