#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace xaieval::nn {

enum class Activation { ReLU, Linear };

const char* to_string(Activation act);
Activation activation_from_string(const std::string& name);

// One fully connected layer: out = act(W * in + b), W stored row-major
// (out_dim rows of in_dim entries).
struct DenseLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::Linear;

  double weight(std::size_t out, std::size_t in) const { return weights[out * in_dim + in]; }
  std::span<const double> row(std::size_t out) const {
    return {weights.data() + out * in_dim, in_dim};
  }
};

// Pre- and post-activation values for every layer of one forward pass.
// inputs[l] is the vector fed to layer l, so inputs[0] is x itself.
struct ForwardTrace {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre_activations;
  std::vector<std::vector<double>> outputs;

  const std::vector<double>& logits() const { return outputs.back(); }
};

// Feed-forward classifier whose final layer emits raw logits.
//
// Invariants (checked by validate()): layer dims chain from input_dim to
// num_classes, the last layer is Linear, weight/bias sizes match, and
// feature_names has input_dim entries.
class DenseNetwork {
 public:
  DenseNetwork() = default;
  DenseNetwork(std::vector<DenseLayer> layers, std::vector<std::string> feature_names);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t num_classes() const { return num_classes_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  // Throws ShapeError describing the first violated invariant.
  void validate() const;

 private:
  std::vector<DenseLayer> layers_;
  std::size_t input_dim_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<std::string> feature_names_;
};

std::vector<double> forward(const DenseNetwork& net, std::span<const double> x);
ForwardTrace forward_trace(const DenseNetwork& net, std::span<const double> x);

// Argmax of the logits. Ties resolve to the lowest class index.
std::size_t predict(const DenseNetwork& net, std::span<const double> x);
std::size_t argmax(std::span<const double> values);

// d logits[target_class] / d x by reverse mode. The ReLU derivative at a
// pre-activation of exactly 0 is taken as 0.
std::vector<double> gradient(const DenseNetwork& net, std::span<const double> x,
                             std::size_t target_class);

// Same, reusing an existing trace of x.
std::vector<double> gradient(const DenseNetwork& net, const ForwardTrace& trace,
                             std::size_t target_class);

// Names "f0", "f1", ... for anonymous inputs.
std::vector<std::string> default_feature_names(std::size_t count);

}  // namespace xaieval::nn
