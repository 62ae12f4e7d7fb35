#pragma once

// Test-only helpers: random networks and straight-line oracles that do not
// share code with the library's forward/backward passes.

#include <cmath>
#include <cstdint>
#include <vector>

#include "xaieval/core/random.hpp"
#include "xaieval/nn/network.hpp"

namespace testing {

inline xaieval::nn::DenseNetwork random_network(std::uint64_t seed, const std::vector<std::size_t>& widths,
                                                double bias_scale = 0.5) {
  xaieval::Rng rng(seed);
  std::vector<xaieval::nn::DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    xaieval::nn::DenseLayer layer;
    layer.in_dim = widths[l];
    layer.out_dim = widths[l + 1];
    layer.activation = l + 2 == widths.size() ? xaieval::nn::Activation::Linear
                                              : xaieval::nn::Activation::ReLU;
    for (std::size_t k = 0; k < layer.in_dim * layer.out_dim; ++k)
      layer.weights.push_back(xaieval::standard_normal(rng) / std::sqrt(static_cast<double>(layer.in_dim)));
    for (std::size_t k = 0; k < layer.out_dim; ++k)
      layer.bias.push_back(bias_scale * (2.0 * xaieval::uniform01(rng) - 1.0));
    layers.push_back(std::move(layer));
  }
  return xaieval::nn::DenseNetwork(std::move(layers), xaieval::nn::default_feature_names(widths.front()));
}

inline std::vector<double> random_input(std::uint64_t seed, std::size_t d) {
  xaieval::Rng rng(seed);
  std::vector<double> x(d);
  for (double& v : x) v = xaieval::uniform01(rng);
  return x;
}

// Independent evaluation: explicit nested loops over weights(out, in).
inline std::vector<double> oracle_forward(const xaieval::nn::DenseNetwork& net, std::vector<double> x) {
  for (const auto& layer : net.layers()) {
    std::vector<double> y(layer.out_dim);
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      long double acc = layer.bias[j];
      for (std::size_t i = 0; i < layer.in_dim; ++i)
        acc += static_cast<long double>(layer.weight(j, i)) * x[i];
      y[j] = static_cast<double>(acc);
      if (layer.activation == xaieval::nn::Activation::ReLU && y[j] < 0.0) y[j] = 0.0;
    }
    x = std::move(y);
  }
  return x;
}

inline std::vector<double> finite_difference(const xaieval::nn::DenseNetwork& net, const std::vector<double>& x,
                                             std::size_t target, double h = 1e-4) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto up = x, down = x;
    up[i] += h;
    down[i] -= h;
    g[i] = (oracle_forward(net, up)[target] - oracle_forward(net, down)[target]) / (2.0 * h);
  }
  return g;
}

// Smallest |pre-activation| over the ReLU units, used to skip near-kink
// coordinates where finite differences straddle a kink.
inline double min_kink_distance(const xaieval::nn::DenseNetwork& net, std::vector<double> x) {
  double best = INFINITY;
  for (const auto& layer : net.layers()) {
    std::vector<double> y(layer.out_dim);
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      double acc = layer.bias[j];
      for (std::size_t i = 0; i < layer.in_dim; ++i) acc += layer.weight(j, i) * x[i];
      if (layer.activation == xaieval::nn::Activation::ReLU) best = std::min(best, std::abs(acc));
      y[j] = layer.activation == xaieval::nn::Activation::ReLU && acc < 0.0 ? 0.0 : acc;
    }
    x = std::move(y);
  }
  return best;
}

// On/off state of every ReLU unit at x.
inline std::vector<bool> activation_pattern(const xaieval::nn::DenseNetwork& net, std::vector<double> x) {
  std::vector<bool> pattern;
  for (const auto& layer : net.layers()) {
    std::vector<double> y(layer.out_dim);
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      double acc = layer.bias[j];
      for (std::size_t i = 0; i < layer.in_dim; ++i) acc += layer.weight(j, i) * x[i];
      const bool relu = layer.activation == xaieval::nn::Activation::ReLU;
      if (relu) pattern.push_back(acc > 0.0);
      y[j] = relu && acc < 0.0 ? 0.0 : acc;
    }
    x = std::move(y);
  }
  return pattern;
}

inline xaieval::nn::DenseNetwork linear_network(std::vector<std::vector<double>> w, std::vector<double> b) {
  xaieval::nn::DenseLayer layer;
  layer.out_dim = w.size();
  layer.in_dim = w.front().size();
  for (const auto& row : w) layer.weights.insert(layer.weights.end(), row.begin(), row.end());
  layer.bias = std::move(b);
  return xaieval::nn::DenseNetwork({layer}, xaieval::nn::default_feature_names(layer.in_dim));
}

}  // namespace testing
