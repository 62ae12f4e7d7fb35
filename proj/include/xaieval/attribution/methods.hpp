#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xaieval/nn/network.hpp"

namespace xaieval::attribution {

enum class Method { IG, LRP, DeepLift };

const char* to_string(Method method);
// Accepts "ig", "lrp", "deeplift" (case-insensitive).
Method method_from_string(const std::string& name);
inline constexpr Method kAllMethods[] = {Method::IG, Method::LRP, Method::DeepLift};

struct AttributionParams {
  std::size_t ig_steps = 128;
  std::vector<double> ig_baseline;  // empty means all zeros
  double lrp_epsilon = 1e-6;
  std::vector<double> deeplift_reference;  // empty means all zeros

  nlohmann::json to_json() const;
};

// Per-feature relevance for one instance and one target logit.
//
// residual is the method's own conservation check: sum(scores) minus
// f(x)-f(baseline) for IG, f(x)-f(reference) for DeepLift, and f(x) for LRP.
struct Attribution {
  Method method = Method::IG;
  std::vector<double> scores;
  std::size_t target_class = 0;
  std::string instance_id;
  double residual = 0.0;

  nlohmann::json to_json(const std::vector<std::string>& feature_names) const;
};

// Midpoint Riemann approximation of the path integral from baseline to x.
Attribution integrated_gradients(const nn::DenseNetwork& net, std::span<const double> x,
                                 std::span<const double> baseline, std::size_t steps,
                                 std::size_t target_class);

// Relevance bookkeeping for one Linear map during epsilon-rule LRP.
struct LrpLayerAudit {
  std::size_t layer = 0;
  std::size_t units = 0;
  double relevance_out = 0.0;  // sum of relevance arriving at the layer output
  double relevance_in = 0.0;   // sum redistributed onto the layer input
  double bias_absorbed = 0.0;
  double epsilon_absorbed = 0.0;
  // epsilon * units * max_j |R_j / (z_j + epsilon*sign(z_j))|
  double epsilon_bound = 0.0;

  // Leakage after removing the bias share, compared with epsilon_bound plus
  // a rounding allowance.
  double unexplained_leak() const { return (relevance_out - bias_absorbed) - relevance_in; }
  bool within_bound(double rounding = 1e-9) const;
};

// Epsilon-rule LRP. The target logit's value is the starting relevance;
// sign(0) is taken as +1 in the stabilizer so an all-zero pre-activation
// divides by epsilon and redistributes nothing.
Attribution lrp(const nn::DenseNetwork& net, std::span<const double> x, std::size_t target_class,
                double epsilon, std::vector<LrpLayerAudit>* audit = nullptr);

// DeepLift with the Rescale rule for ReLU units.
Attribution deeplift(const nn::DenseNetwork& net, std::span<const double> x,
                     std::span<const double> reference, std::size_t target_class);

// Below this |delta z| the rescale multiplier falls back to the gradient.
inline constexpr double kDeepLiftDeltaFloor = 1e-7;

Attribution explain(const nn::DenseNetwork& net, std::span<const double> x, std::size_t target_class,
                    Method method, const AttributionParams& params);

// Feature indices ordered by |score| descending, ties by lower index.
std::vector<std::size_t> rank_by_magnitude(std::span<const double> scores);

}  // namespace xaieval::attribution
