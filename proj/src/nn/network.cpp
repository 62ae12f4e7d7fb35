#include "xaieval/nn/network.hpp"

#include <cmath>
#include <sstream>

#include "xaieval/core/error.hpp"

namespace xaieval::nn {

const char* to_string(Activation act) { return act == Activation::ReLU ? "relu" : "linear"; }

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "linear") return Activation::Linear;
  throw InvalidArgument("unknown activation '" + name + "'");
}

DenseNetwork::DenseNetwork(std::vector<DenseLayer> layers, std::vector<std::string> feature_names)
    : layers_(std::move(layers)), feature_names_(std::move(feature_names)) {
  if (layers_.empty()) throw ShapeError("network needs at least one layer");
  input_dim_ = layers_.front().in_dim;
  num_classes_ = layers_.back().out_dim;
  validate();
}

void DenseNetwork::validate() const {
  if (layers_.empty()) throw ShapeError("network needs at least one layer");
  std::size_t expected_in = input_dim_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    std::ostringstream where;
    where << "layer " << l << ": ";
    if (layer.in_dim != expected_in)
      throw ShapeError(where.str() + "in_dim " + std::to_string(layer.in_dim) +
                       " does not match previous width " + std::to_string(expected_in));
    if (layer.out_dim == 0) throw ShapeError(where.str() + "out_dim is zero");
    if (layer.weights.size() != layer.in_dim * layer.out_dim)
      throw ShapeError(where.str() + "weight count does not equal in_dim*out_dim");
    if (layer.bias.size() != layer.out_dim)
      throw ShapeError(where.str() + "bias length does not equal weight row count");
    expected_in = layer.out_dim;
  }
  if (expected_in != num_classes_) throw ShapeError("last layer width differs from num_classes");
  if (layers_.back().activation != Activation::Linear)
    throw ShapeError("final layer must be Linear (raw logits)");
  if (feature_names_.size() != input_dim_)
    throw ShapeError("feature_names has " + std::to_string(feature_names_.size()) +
                     " entries, expected " + std::to_string(input_dim_));
}

namespace {

void check_input(const DenseNetwork& net, std::span<const double> x) {
  if (x.size() != net.input_dim())
    throw ShapeError("input has length " + std::to_string(x.size()) + ", network expects " +
                     std::to_string(net.input_dim()));
}

void affine(const DenseLayer& layer, std::span<const double> in, std::vector<double>& out) {
  out.resize(layer.out_dim);
  for (std::size_t j = 0; j < layer.out_dim; ++j) {
    const double* w = layer.weights.data() + j * layer.in_dim;
    double acc = layer.bias[j];
    for (std::size_t i = 0; i < layer.in_dim; ++i) acc += w[i] * in[i];
    out[j] = acc;
  }
}

}  // namespace

std::vector<double> forward(const DenseNetwork& net, std::span<const double> x) {
  check_input(net, x);
  std::vector<double> current(x.begin(), x.end());
  std::vector<double> next;
  for (const DenseLayer& layer : net.layers()) {
    affine(layer, current, next);
    if (layer.activation == Activation::ReLU)
      for (double& v : next) v = v > 0.0 ? v : 0.0;
    current.swap(next);
  }
  return current;
}

ForwardTrace forward_trace(const DenseNetwork& net, std::span<const double> x) {
  check_input(net, x);
  ForwardTrace trace;
  const std::size_t n = net.layers().size();
  trace.inputs.reserve(n);
  trace.pre_activations.resize(n);
  trace.outputs.resize(n);
  std::vector<double> current(x.begin(), x.end());
  for (std::size_t l = 0; l < n; ++l) {
    const DenseLayer& layer = net.layers()[l];
    trace.inputs.push_back(current);
    affine(layer, current, trace.pre_activations[l]);
    trace.outputs[l] = trace.pre_activations[l];
    if (layer.activation == Activation::ReLU)
      for (double& v : trace.outputs[l]) v = v > 0.0 ? v : 0.0;
    current = trace.outputs[l];
  }
  return trace;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::size_t predict(const DenseNetwork& net, std::span<const double> x) {
  return argmax(forward(net, x));
}

std::vector<double> gradient(const DenseNetwork& net, const ForwardTrace& trace,
                             std::size_t target_class) {
  if (target_class >= net.num_classes())
    throw InvalidArgument("target class " + std::to_string(target_class) + " out of range [0, " +
                          std::to_string(net.num_classes()) + ")");
  std::vector<double> upstream(net.num_classes(), 0.0);
  upstream[target_class] = 1.0;
  std::vector<double> downstream;
  for (std::size_t l = net.layers().size(); l-- > 0;) {
    const DenseLayer& layer = net.layers()[l];
    if (layer.activation == Activation::ReLU) {
      const auto& z = trace.pre_activations[l];
      for (std::size_t j = 0; j < layer.out_dim; ++j)
        if (!(z[j] > 0.0)) upstream[j] = 0.0;
    }
    downstream.assign(layer.in_dim, 0.0);
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      const double g = upstream[j];
      if (g == 0.0) continue;
      const double* w = layer.weights.data() + j * layer.in_dim;
      for (std::size_t i = 0; i < layer.in_dim; ++i) downstream[i] += w[i] * g;
    }
    upstream.swap(downstream);
  }
  return upstream;
}

std::vector<double> gradient(const DenseNetwork& net, std::span<const double> x,
                             std::size_t target_class) {
  if (target_class >= net.num_classes())
    throw InvalidArgument("target class " + std::to_string(target_class) + " out of range [0, " +
                          std::to_string(net.num_classes()) + ")");
  return gradient(net, forward_trace(net, x), target_class);
}

std::vector<std::string> default_feature_names(std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t i = 0; i < count; ++i) names.push_back("f" + std::to_string(i));
  return names;
}

}  // namespace xaieval::nn
