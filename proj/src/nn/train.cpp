#include "xaieval/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xaieval/core/error.hpp"
#include "xaieval/core/random.hpp"

namespace xaieval::nn {

nlohmann::json Architecture::to_json() const { return {{"hidden", hidden}}; }

Architecture Architecture::from_json(const nlohmann::json& j) {
  Architecture arch;
  arch.hidden = j.value("hidden", std::vector<std::size_t>{});
  for (std::size_t width : arch.hidden)
    if (width == 0) throw InvalidArgument("architecture: hidden width must be positive");
  return arch;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (early_stop_patience < 1) throw InvalidArgument("early_stop_patience must be >= 1");
  if (max_epochs < 1) throw InvalidArgument("max_epochs must be >= 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw InvalidArgument("validation_fraction must lie in [0, 1)");
}

nlohmann::json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate},
          {"max_epochs", max_epochs},
          {"early_stop_patience", early_stop_patience},
          {"seed", seed},
          {"optimizer", "adam"},
          {"batch_size", batch_size},
          {"validation_fraction", validation_fraction}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
  cfg.early_stop_patience = j.value("early_stop_patience", cfg.early_stop_patience);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.value("optimizer", std::string("adam")) != "adam")
    throw InvalidArgument("only the adam optimizer is supported");
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.validation_fraction = j.value("validation_fraction", cfg.validation_fraction);
  cfg.validate();
  return cfg;
}

nlohmann::json TrainReport::to_json() const {
  return {{"epochs_run", epochs_run},
          {"best_epoch", best_epoch},
          {"early_stopped", early_stopped},
          {"train_loss", train_loss},
          {"validation_loss", validation_loss},
          {"accepted_epochs", accepted_epochs},
          {"final_train_accuracy", final_train_accuracy},
          {"final_validation_accuracy", final_validation_accuracy}};
}

DenseNetwork initialize(std::size_t input_dim, std::size_t num_classes, const Architecture& arch,
                        std::vector<std::string> feature_names, std::uint64_t seed) {
  if (input_dim == 0 || num_classes == 0)
    throw InvalidArgument("network needs at least one input and one class");
  Rng rng(seed);
  std::vector<DenseLayer> layers;
  std::size_t in = input_dim;
  auto make = [&](std::size_t out, Activation act) {
    DenseLayer layer;
    layer.in_dim = in;
    layer.out_dim = out;
    layer.activation = act;
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    layer.weights.resize(in * out);
    for (double& w : layer.weights) w = (2.0 * uniform01(rng) - 1.0) * limit;
    layer.bias.assign(out, 0.0);
    layers.push_back(std::move(layer));
    in = out;
  };
  for (std::size_t width : arch.hidden) make(width, Activation::ReLU);
  make(num_classes, Activation::Linear);
  return DenseNetwork(std::move(layers), std::move(feature_names));
}

namespace {

// Per-parameter gradient buffers laid out like the network.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;

  explicit Gradients(const DenseNetwork& net) {
    for (const auto& layer : net.layers()) {
      weights.emplace_back(layer.weights.size(), 0.0);
      bias.emplace_back(layer.bias.size(), 0.0);
    }
  }
  void zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
  }
};

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Accumulates d(loss)/d(params) for one sample; returns that sample's loss.
double accumulate_sample(const DenseNetwork& net, std::span<const double> x, std::size_t label,
                         Gradients& grads) {
  const ForwardTrace trace = forward_trace(net, x);
  const auto& logits = trace.logits();
  const double lse = log_sum_exp(logits);
  std::vector<double> delta(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) delta[k] = std::exp(logits[k] - lse);
  delta[label] -= 1.0;
  const double loss = lse - logits[label];

  std::vector<double> below;
  for (std::size_t l = net.layers().size(); l-- > 0;) {
    const DenseLayer& layer = net.layers()[l];
    if (layer.activation == Activation::ReLU)
      for (std::size_t j = 0; j < layer.out_dim; ++j)
        if (!(trace.pre_activations[l][j] > 0.0)) delta[j] = 0.0;
    const auto& input = trace.inputs[l];
    auto& gw = grads.weights[l];
    auto& gb = grads.bias[l];
    below.assign(layer.in_dim, 0.0);
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      const double d = delta[j];
      if (d == 0.0) continue;
      gb[j] += d;
      double* grow = gw.data() + j * layer.in_dim;
      const double* wrow = layer.weights.data() + j * layer.in_dim;
      for (std::size_t i = 0; i < layer.in_dim; ++i) {
        grow[i] += d * input[i];
        below[i] += d * wrow[i];
      }
    }
    delta.swap(below);
  }
  return loss;
}

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-7;

  Gradients m;
  Gradients v;
  std::size_t step = 0;

  explicit AdamState(const DenseNetwork& net) : m(net), v(net) {}

  void apply(DenseNetwork& net, const Gradients& g, double scale, double lr) {
    ++step;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
    auto update = [&](std::vector<double>& param, const std::vector<double>& grad,
                      std::vector<double>& m1, std::vector<double>& m2) {
      for (std::size_t i = 0; i < param.size(); ++i) {
        const double gi = grad[i] * scale;
        m1[i] = kBeta1 * m1[i] + (1.0 - kBeta1) * gi;
        m2[i] = kBeta2 * m2[i] + (1.0 - kBeta2) * gi * gi;
        param[i] -= lr * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + kEpsilon);
      }
    };
    auto& layers = net.mutable_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].weights, g.weights[l], m.weights[l], v.weights[l]);
      update(layers[l].bias, g.bias[l], m.bias[l], v.bias[l]);
    }
  }
};

double mean_loss(const DenseNetwork& net, const data::Dataset& ds,
                 std::span<const std::size_t> rows) {
  double total = 0.0;
  for (std::size_t r : rows) {
    const auto logits = forward(net, ds.row(r));
    total += log_sum_exp(logits) - logits[ds.labels[r]];
  }
  return rows.empty() ? 0.0 : total / static_cast<double>(rows.size());
}

double mean_accuracy(const DenseNetwork& net, const data::Dataset& ds,
                     std::span<const std::size_t> rows) {
  std::size_t hits = 0;
  for (std::size_t r : rows) hits += predict(net, ds.row(r)) == ds.labels[r];
  return rows.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(rows.size());
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

}  // namespace

DenseNetwork train(const data::Dataset& train_set, const Architecture& arch, const TrainConfig& cfg,
                   TrainReport* report) {
  cfg.validate();
  if (train_set.rows() == 0) throw InvalidArgument("training set is empty");
  if (train_set.num_classes() == 0) throw InvalidArgument("training set has no classes");
  for (std::size_t label : train_set.labels)
    if (label >= train_set.num_classes())
      throw InvalidArgument("label " + std::to_string(label) + " out of range [0, " +
                            std::to_string(train_set.num_classes()) + ")");

  DenseNetwork net = initialize(train_set.cols(), train_set.num_classes(), arch,
                                train_set.feature_names, derive_seed(cfg.seed, 0));

  std::vector<std::size_t> order = all_rows(train_set.rows());
  Rng split_rng(derive_seed(cfg.seed, 1));
  shuffle(order, split_rng);
  auto n_val = static_cast<std::size_t>(
      std::floor(cfg.validation_fraction * static_cast<double>(order.size())));
  if (order.size() - n_val == 0) n_val = 0;
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> fit_rows(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val_rows.begin(), val_rows.end());
  std::sort(fit_rows.begin(), fit_rows.end());
  // Without a validation split, early stopping monitors the training loss.
  const std::span<const std::size_t> monitor = val_rows.empty() ? std::span<const std::size_t>(fit_rows)
                                                                : std::span<const std::size_t>(val_rows);

  const std::size_t batch =
      cfg.batch_size == 0 ? fit_rows.size() : std::min(cfg.batch_size, fit_rows.size());
  Gradients grads(net);
  AdamState adam(net);
  Rng batch_rng(derive_seed(cfg.seed, 2));

  TrainReport local;
  DenseNetwork best = net;
  double best_loss = mean_loss(net, train_set, monitor);
  std::size_t since_best = 0;
  std::vector<std::size_t> epoch_rows = fit_rows;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    if (batch < epoch_rows.size()) shuffle(epoch_rows, batch_rng);
    for (std::size_t start = 0; start < epoch_rows.size(); start += batch) {
      const std::size_t stop = std::min(start + batch, epoch_rows.size());
      grads.zero();
      for (std::size_t k = start; k < stop; ++k)
        accumulate_sample(net, train_set.row(epoch_rows[k]), train_set.labels[epoch_rows[k]], grads);
      adam.apply(net, grads, 1.0 / static_cast<double>(stop - start), cfg.learning_rate);
    }
    const double train_loss = mean_loss(net, train_set, fit_rows);
    const double monitored = val_rows.empty() ? train_loss : mean_loss(net, train_set, val_rows);
    if (!std::isfinite(train_loss)) throw Error("training diverged (non-finite loss)");
    local.train_loss.push_back(train_loss);
    local.validation_loss.push_back(monitored);
    local.epochs_run = epoch;
    if (monitored < best_loss) {
      best_loss = monitored;
      best = net;
      since_best = 0;
      local.best_epoch = epoch;
      local.accepted_epochs.push_back(epoch);
    } else if (++since_best >= cfg.early_stop_patience) {
      local.early_stopped = true;
      break;
    }
  }
  local.final_train_accuracy = mean_accuracy(best, train_set, fit_rows);
  local.final_validation_accuracy = mean_accuracy(best, train_set, monitor);
  if (report) *report = std::move(local);
  return best;
}

double cross_entropy(const DenseNetwork& net, const data::Dataset& ds) {
  return mean_loss(net, ds, all_rows(ds.rows()));
}

double accuracy(const DenseNetwork& net, const data::Dataset& ds) {
  return mean_accuracy(net, ds, all_rows(ds.rows()));
}

}  // namespace xaieval::nn
