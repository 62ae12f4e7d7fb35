#include "xaieval/attribution/methods.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "xaieval/core/error.hpp"

namespace xaieval::attribution {

const char* to_string(Method method) {
  switch (method) {
    case Method::IG: return "ig";
    case Method::LRP: return "lrp";
    case Method::DeepLift: return "deeplift";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "ig") return Method::IG;
  if (lower == "lrp") return Method::LRP;
  if (lower == "deeplift") return Method::DeepLift;
  throw InvalidArgument("unknown attribution method '" + name + "' (expected ig, lrp or deeplift)");
}

nlohmann::json AttributionParams::to_json() const {
  return {{"ig_steps", ig_steps},
          {"ig_baseline", ig_baseline.empty() ? nlohmann::json("zeros") : nlohmann::json(ig_baseline)},
          {"lrp_epsilon", lrp_epsilon},
          {"deeplift_reference", deeplift_reference.empty() ? nlohmann::json("zeros")
                                                            : nlohmann::json(deeplift_reference)}};
}

nlohmann::json Attribution::to_json(const std::vector<std::string>& feature_names) const {
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t i = 0; i < scores.size(); ++i)
    features.push_back({{"name", i < feature_names.size() ? feature_names[i] : std::to_string(i)},
                        {"score", scores[i]}});
  return {{"method", to_string(method)},
          {"target_class", target_class},
          {"instance_id", instance_id},
          {"features", features},
          {"residual", residual}};
}

namespace {

void require_same_length(std::span<const double> x, std::span<const double> other, const char* what) {
  if (x.size() != other.size())
    throw ShapeError(std::string(what) + " has length " + std::to_string(other.size()) +
                     ", input has " + std::to_string(x.size()));
}

void require_target(const nn::DenseNetwork& net, std::size_t target) {
  if (target >= net.num_classes())
    throw InvalidArgument("target class " + std::to_string(target) + " out of range [0, " +
                          std::to_string(net.num_classes()) + ")");
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

Attribution integrated_gradients(const nn::DenseNetwork& net, std::span<const double> x,
                                 std::span<const double> baseline, std::size_t steps,
                                 std::size_t target_class) {
  require_same_length(x, baseline, "baseline");
  if (x.size() != net.input_dim()) throw ShapeError("input length does not match network");
  require_target(net, target_class);
  if (steps == 0) throw InvalidArgument("integrated gradients needs at least one step");

  const std::size_t d = x.size();
  std::vector<double> delta(d), point(d), total(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) delta[i] = x[i] - baseline[i];
  const double inv_steps = 1.0 / static_cast<double>(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double alpha = (static_cast<double>(k) + 0.5) * inv_steps;
    for (std::size_t i = 0; i < d; ++i) point[i] = baseline[i] + alpha * delta[i];
    const auto g = nn::gradient(net, point, target_class);
    for (std::size_t i = 0; i < d; ++i) total[i] += g[i];
  }

  Attribution out;
  out.method = Method::IG;
  out.target_class = target_class;
  out.scores.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.scores[i] = delta[i] * (total[i] * inv_steps);
  const double fx = nn::forward(net, x)[target_class];
  const double fb = nn::forward(net, baseline)[target_class];
  out.residual = sum(out.scores) - (fx - fb);
  return out;
}

bool LrpLayerAudit::within_bound(double rounding) const {
  const double scale = 1.0 + std::abs(relevance_out) + std::abs(bias_absorbed);
  return std::abs(unexplained_leak()) <= epsilon_bound + rounding * scale;
}

Attribution lrp(const nn::DenseNetwork& net, std::span<const double> x, std::size_t target_class,
                double epsilon, std::vector<LrpLayerAudit>* audit) {
  if (!(epsilon > 0.0)) throw InvalidArgument("LRP epsilon must be > 0");
  require_target(net, target_class);
  const nn::ForwardTrace trace = nn::forward_trace(net, x);
  const double f_target = trace.logits()[target_class];

  std::vector<double> relevance(net.num_classes(), 0.0);
  relevance[target_class] = f_target;
  if (audit) audit->clear();

  std::vector<double> below, ratio;
  for (std::size_t l = net.layers().size(); l-- > 0;) {
    const nn::DenseLayer& layer = net.layers()[l];
    // ReLU hands relevance to the pre-activation unchanged.
    const auto& z = trace.pre_activations[l];
    const auto& a = trace.inputs[l];
    ratio.resize(layer.out_dim);
    LrpLayerAudit entry;
    entry.layer = l;
    entry.units = layer.out_dim;
    double max_ratio = 0.0;
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      const double stab = epsilon * (z[j] >= 0.0 ? 1.0 : -1.0);
      ratio[j] = relevance[j] / (z[j] + stab);
      entry.relevance_out += relevance[j];
      entry.bias_absorbed += ratio[j] * layer.bias[j];
      entry.epsilon_absorbed += ratio[j] * stab;
      max_ratio = std::max(max_ratio, std::abs(ratio[j]));
    }
    below.assign(layer.in_dim, 0.0);
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      const double r = ratio[j];
      if (r == 0.0) continue;
      const double* w = layer.weights.data() + j * layer.in_dim;
      for (std::size_t i = 0; i < layer.in_dim; ++i) below[i] += a[i] * w[i] * r;
    }
    entry.relevance_in = sum(below);
    entry.epsilon_bound = epsilon * static_cast<double>(layer.out_dim) * max_ratio;
    if (audit) audit->push_back(entry);
    relevance.swap(below);
  }

  Attribution out;
  out.method = Method::LRP;
  out.target_class = target_class;
  out.scores = std::move(relevance);
  out.residual = sum(out.scores) - f_target;
  return out;
}

Attribution deeplift(const nn::DenseNetwork& net, std::span<const double> x,
                     std::span<const double> reference, std::size_t target_class) {
  require_same_length(x, reference, "reference");
  require_target(net, target_class);
  const nn::ForwardTrace tx = nn::forward_trace(net, x);
  const nn::ForwardTrace tr = nn::forward_trace(net, reference);

  std::vector<double> multiplier(net.num_classes(), 0.0);
  multiplier[target_class] = 1.0;
  std::vector<double> below;
  for (std::size_t l = net.layers().size(); l-- > 0;) {
    const nn::DenseLayer& layer = net.layers()[l];
    if (layer.activation == nn::Activation::ReLU) {
      for (std::size_t j = 0; j < layer.out_dim; ++j) {
        const double dz = tx.pre_activations[l][j] - tr.pre_activations[l][j];
        if (std::abs(dz) >= kDeepLiftDeltaFloor) {
          multiplier[j] *= (tx.outputs[l][j] - tr.outputs[l][j]) / dz;
        } else {
          multiplier[j] *= tx.pre_activations[l][j] > 0.0 ? 1.0 : 0.0;
        }
      }
    }
    below.assign(layer.in_dim, 0.0);
    for (std::size_t j = 0; j < layer.out_dim; ++j) {
      const double m = multiplier[j];
      if (m == 0.0) continue;
      const double* w = layer.weights.data() + j * layer.in_dim;
      for (std::size_t i = 0; i < layer.in_dim; ++i) below[i] += w[i] * m;
    }
    multiplier.swap(below);
  }

  Attribution out;
  out.method = Method::DeepLift;
  out.target_class = target_class;
  out.scores.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.scores[i] = multiplier[i] * (x[i] - reference[i]);
  out.residual = sum(out.scores) - (tx.logits()[target_class] - tr.logits()[target_class]);
  return out;
}

Attribution explain(const nn::DenseNetwork& net, std::span<const double> x, std::size_t target_class,
                    Method method, const AttributionParams& params) {
  switch (method) {
    case Method::IG: {
      if (params.ig_baseline.empty()) {
        const std::vector<double> zeros(x.size(), 0.0);
        return integrated_gradients(net, x, zeros, params.ig_steps, target_class);
      }
      return integrated_gradients(net, x, params.ig_baseline, params.ig_steps, target_class);
    }
    case Method::LRP:
      return lrp(net, x, target_class, params.lrp_epsilon);
    case Method::DeepLift: {
      if (params.deeplift_reference.empty()) {
        const std::vector<double> zeros(x.size(), 0.0);
        return deeplift(net, x, zeros, target_class);
      }
      return deeplift(net, x, params.deeplift_reference, target_class);
    }
  }
  throw InvalidArgument("unknown attribution method");
}

std::vector<std::size_t> rank_by_magnitude(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(scores[a]) > std::abs(scores[b]);
  });
  return order;
}

}  // namespace xaieval::attribution
