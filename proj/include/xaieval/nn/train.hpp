#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "xaieval/data/dataset.hpp"
#include "xaieval/nn/network.hpp"

namespace xaieval::nn {

// Hidden layer widths; every hidden layer uses ReLU and a Linear layer with
// one unit per class is appended.
struct Architecture {
  std::vector<std::size_t> hidden;

  nlohmann::json to_json() const;
  static Architecture from_json(const nlohmann::json& j);
};

enum class Optimizer { Adam };

struct TrainConfig {
  double learning_rate = 0.001;
  std::size_t max_epochs = 1000;
  std::size_t early_stop_patience = 10;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::Adam;
  std::size_t batch_size = 0;  // 0 = full batch
  double validation_fraction = 0.1;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

struct TrainReport {
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  bool early_stopped = false;
  std::vector<double> train_loss;       // per epoch, after the update
  std::vector<double> validation_loss;  // per epoch
  std::vector<std::size_t> accepted_epochs;  // epochs that improved validation loss
  double final_train_accuracy = 0.0;
  double final_validation_accuracy = 0.0;

  nlohmann::json to_json() const;
};

// Glorot-uniform weights and zero biases from `seed`.
DenseNetwork initialize(std::size_t input_dim, std::size_t num_classes, const Architecture& arch,
                        std::vector<std::string> feature_names, std::uint64_t seed);

// Adam on mean softmax cross-entropy (log-sum-exp over logits). Holds out
// validation_fraction of the rows for early stopping and returns the
// weights of the best validation epoch. Single-threaded and deterministic.
DenseNetwork train(const data::Dataset& train_set, const Architecture& arch, const TrainConfig& cfg,
                   TrainReport* report = nullptr);

double cross_entropy(const DenseNetwork& net, const data::Dataset& ds);
double accuracy(const DenseNetwork& net, const data::Dataset& ds);

}  // namespace xaieval::nn
