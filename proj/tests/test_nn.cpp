#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "xaieval/core/error.hpp"
#include "xaieval/data/synth.hpp"
#include "xaieval/nn/model_io.hpp"
#include "xaieval/nn/network.hpp"
#include "xaieval/nn/train.hpp"

using namespace xaieval;

TEST_CASE("forward: single linear layer") {
  const auto net = testing::linear_network({{2, 0}, {0, 3}}, {1, -1});
  const std::vector<double> x = {1, 1};
  const auto logits = nn::forward(net, x);
  CHECK(logits == std::vector<double>{3, 2});
  CHECK(nn::predict(net, x) == 0);
}

TEST_CASE("forward: zero input with zero biases gives zero logits") {
  auto net = testing::random_network(3, {6, 5, 4, 3}, 0.0);
  const std::vector<double> zero(6, 0.0);
  for (double v : nn::forward(net, zero)) CHECK(v == 0.0);
}

TEST_CASE("forward: matches the straight-line oracle on random 3-layer nets") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto net = testing::random_network(100 + seed, {7, 9, 6, 4});
    const auto x = testing::random_input(200 + seed, 7);
    const auto got = nn::forward(net, x);
    const auto want = testing::oracle_forward(net, x);
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
    // The trace exposes every layer and ends at the same logits.
    const auto trace = nn::forward_trace(net, x);
    CHECK(trace.inputs.size() == 3);
    CHECK(trace.logits() == got);
  }
}

TEST_CASE("forward: shape errors") {
  const auto net = testing::linear_network({{1, 2}}, {0});
  const std::vector<double> bad = {1, 2, 3};
  CHECK_THROWS_AS(nn::forward(net, bad), ShapeError);
  nn::DenseLayer layer{2, 1, {1, 2}, {0, 0}, nn::Activation::Linear};
  CHECK_THROWS_AS(nn::DenseNetwork({layer}, {"a", "b"}), ShapeError);
  nn::DenseLayer relu_out{2, 1, {1, 2}, {0}, nn::Activation::ReLU};
  CHECK_THROWS_AS(nn::DenseNetwork({relu_out}, {"a", "b"}), ShapeError);
  nn::DenseLayer ok{2, 1, {1, 2}, {0}, nn::Activation::Linear};
  CHECK_THROWS_AS(nn::DenseNetwork({ok}, {"a"}), ShapeError);
}

TEST_CASE("predict: ties resolve to the lowest index") {
  const auto net = testing::linear_network({{1, 0}, {0, 1}}, {0, 0});
  const std::vector<double> x = {1, 1};
  CHECK(nn::predict(net, x) == 0);
  const std::vector<double> logits = {0.5, 2.0, 2.0};
  CHECK(nn::argmax(logits) == 1);
}

TEST_CASE("gradient: linear model returns the weight row") {
  const auto net = testing::linear_network({{0.5, -2, 3}, {1, 1, 1}}, {0.25, 0});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = testing::random_input(seed, 3);
    CHECK(nn::gradient(net, x, 0) == std::vector<double>{0.5, -2, 3});
  }
  CHECK_THROWS_AS(nn::gradient(net, std::vector<double>{0, 0, 0}, 2), InvalidArgument);
}

TEST_CASE("gradient: all ReLU units inactive gives zero") {
  auto net = testing::random_network(9, {4, 5, 2});
  auto& hidden = net.mutable_layers()[0];
  for (double& b : hidden.bias) b = -100.0;
  const auto g = nn::gradient(net, testing::random_input(1, 4), 1);
  for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("gradient: agrees with central finite differences on random nets") {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    xaieval::Rng rng(seed);
    const std::size_t depth = 2 + xaieval::uniform_index(rng, 3);
    std::vector<std::size_t> widths = {2 + xaieval::uniform_index(rng, 12)};
    for (std::size_t l = 1; l < depth; ++l) widths.push_back(2 + xaieval::uniform_index(rng, 10));
    widths.push_back(2 + xaieval::uniform_index(rng, 4));
    const auto net = testing::random_network(1000 + seed, widths);
    const auto x = testing::random_input(2000 + seed, widths.front());
    const std::size_t target = xaieval::uniform_index(rng, widths.back());
    const double h = 1e-4;
    const auto g = nn::gradient(net, x, target);
    const auto fd = testing::finite_difference(net, x, target, h);
    const auto base = testing::activation_pattern(net, x);
    if (testing::min_kink_distance(net, x) < 1e-6) continue;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto up = x, down = x;
      up[i] += h;
      down[i] -= h;
      if (testing::activation_pattern(net, up) != base || testing::activation_pattern(net, down) != base)
        continue;
      CHECK(std::abs(g[i] - fd[i]) <= 1e-3 * std::max(std::abs(g[i]), std::abs(fd[i])) + 1e-7);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

namespace {

data::Dataset separable_2d(std::size_t n, std::uint64_t seed) {
  // Two clusters either side of the line x0 = x1 with margin 1.0 before
  // scaling into [0,1]^2.
  Rng rng(seed);
  data::Dataset ds;
  ds.feature_names = {"x0", "x1"};
  ds.class_names = {"neg", "pos"};
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t label = r % 2;
    const double t = uniform01(rng) * 4.0;
    const double offset = 0.5 + uniform01(rng) * 1.5;  // distance from the line >= 0.5 each side
    const double a = t + (label ? offset : -offset) / std::sqrt(2.0);
    const double b = t - (label ? offset : -offset) / std::sqrt(2.0);
    ds.features.push_back((a + 2.0) / 8.0);
    ds.features.push_back((b + 2.0) / 8.0);
    ds.labels.push_back(label);
  }
  return ds;
}

// Perceptron on the raw points: converges iff linearly separable.
bool perceptron_separates(const data::Dataset& ds) {
  double w0 = 0, w1 = 0, b = 0;
  for (int epoch = 0; epoch < 10000; ++epoch) {
    bool mistakes = false;
    for (std::size_t r = 0; r < ds.rows(); ++r) {
      const double y = ds.labels[r] ? 1.0 : -1.0;
      if (y * (w0 * ds.at(r, 0) + w1 * ds.at(r, 1) + b) <= 0) {
        w0 += y * ds.at(r, 0);
        w1 += y * ds.at(r, 1);
        b += y;
        mistakes = true;
      }
    }
    if (!mistakes) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("train: linearly separable data reaches high test accuracy") {
  const auto all = separable_2d(400, 5);
  REQUIRE(perceptron_separates(all));
  const auto [train_set, test_set] = data::split(all, 0.5, 1);
  nn::TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 2000;
  cfg.early_stop_patience = 50;
  cfg.seed = 11;
  nn::TrainReport report;
  const auto net = nn::train(train_set, {{8}}, cfg, &report);
  CHECK(nn::accuracy(net, test_set) >= 0.98);
  CHECK(report.epochs_run >= report.best_epoch);
  CHECK(report.train_loss.back() < report.train_loss.front());
  // Training loss never rises between consecutive accepted checkpoints.
  for (std::size_t k = 1; k < report.accepted_epochs.size(); ++k)
    CHECK(report.train_loss[report.accepted_epochs[k] - 1] <=
          report.train_loss[report.accepted_epochs[k - 1] - 1]);
}

TEST_CASE("train: constant label reaches accuracy 1") {
  auto ds = data::synthesize({.n = 100, .d = 3}, 3);
  for (auto& l : ds.labels) l = 1;
  nn::TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 200;
  const auto net = nn::train(ds, {{4}}, cfg);
  CHECK(nn::accuracy(net, ds) == 1.0);
}

TEST_CASE("train: same seed gives bitwise identical weights") {
  const auto ds = data::synthesize({.n = 300, .d = 5}, 8);
  nn::TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 50;
  cfg.batch_size = 32;
  cfg.seed = 99;
  const auto a = nn::train(ds, {{6, 4}}, cfg);
  const auto b = nn::train(ds, {{6, 4}}, cfg);
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    CHECK(a.layers()[l].weights == b.layers()[l].weights);
    CHECK(a.layers()[l].bias == b.layers()[l].bias);
  }
  cfg.seed = 100;
  const auto c = nn::train(ds, {{6, 4}}, cfg);
  CHECK(a.layers()[0].weights != c.layers()[0].weights);
}

TEST_CASE("train: input errors and logit stability") {
  data::Dataset empty;
  empty.feature_names = {"a"};
  empty.class_names = {"x", "y"};
  CHECK_THROWS_AS(nn::train(empty, {}, {}), InvalidArgument);
  auto ds = data::synthesize({.n = 50, .d = 2}, 1);
  ds.labels[3] = 7;
  CHECK_THROWS_AS(nn::train(ds, {}, {}), InvalidArgument);
  nn::TrainConfig bad;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);

  const auto good = data::synthesize({.n = 300, .d = 4}, 2);
  nn::TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.max_epochs = 100;
  const auto net = nn::train(good, {{8, 8}}, cfg);
  for (std::uint64_t s = 0; s < 200; ++s)
    for (double v : nn::forward(net, testing::random_input(s, 4))) CHECK(std::isfinite(v));
}

TEST_CASE("model io: exact round trip") {
  const auto net = testing::random_network(42, {5, 7, 3});
  std::stringstream buffer;
  nn::write_model(net, buffer);
  const auto loaded = nn::read_model(buffer);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto x = testing::random_input(s, 5);
    CHECK(nn::forward(net, x) == nn::forward(loaded, x));
  }
  CHECK(loaded.feature_names() == net.feature_names());
}

TEST_CASE("model io: feature names with spaces survive") {
  auto base = testing::linear_network({{1, 2}}, {0.5});
  nn::DenseNetwork net(base.layers(), {" Flow Duration", "Fwd 100%"});
  std::stringstream buffer;
  nn::write_model(net, buffer);
  CHECK(nn::read_model(buffer).feature_names() == net.feature_names());
}

TEST_CASE("model io: truncated file and bumped version are rejected") {
  const auto net = testing::random_network(4, {3, 4, 2});
  std::stringstream buffer;
  nn::write_model(net, buffer);
  const std::string text = buffer.str();
  for (std::size_t cut : {std::size_t{5}, text.size() / 2, text.size() - 5}) {
    std::stringstream truncated(text.substr(0, cut));
    CHECK_THROWS_AS(nn::read_model(truncated), DecodeError);
  }
  std::string bumped = text;
  bumped.replace(bumped.find(" 1\n"), 3, " 2\n");
  std::stringstream in(bumped);
  CHECK_THROWS_WITH_AS(nn::read_model(in), doctest::Contains("version 2"), DecodeError);

  const auto path = std::filesystem::temp_directory_path() / "xaieval_model_io_test.model";
  nn::save_model(net, path);
  CHECK(nn::forward(nn::load_model(path), std::vector<double>{0.1, 0.2, 0.3}) ==
        nn::forward(net, std::vector<double>{0.1, 0.2, 0.3}));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(nn::load_model(path), DecodeError);
}
