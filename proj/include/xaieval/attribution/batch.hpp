#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xaieval/attribution/methods.hpp"
#include "xaieval/core/parallel.hpp"
#include "xaieval/nn/network.hpp"

namespace xaieval::attribution {

using xaieval::Execution;

// Row-major block of samples, one row per instance.
struct SampleView {
  std::span<const double> values;
  std::size_t dim = 0;

  std::size_t rows() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t r) const { return values.subspan(r * dim, dim); }
};

// Reference implementation: one sample after another.
std::vector<Attribution> explain_batch_serial(const nn::DenseNetwork& net, SampleView samples,
                                              std::span<const std::size_t> targets, Method method,
                                              const AttributionParams& params);

// OpenMP fan-out over samples. Each slot is computed by exactly the same code
// as the serial path, so results are bit-identical to explain_batch_serial.
std::vector<Attribution> explain_batch_parallel(const nn::DenseNetwork& net, SampleView samples,
                                                std::span<const std::size_t> targets, Method method,
                                                const AttributionParams& params);

std::vector<Attribution> explain_batch(const nn::DenseNetwork& net, SampleView samples,
                                       std::span<const std::size_t> targets, Method method,
                                       const AttributionParams& params, Execution exec);

std::vector<std::size_t> predict_batch_serial(const nn::DenseNetwork& net, SampleView samples);
std::vector<std::size_t> predict_batch_parallel(const nn::DenseNetwork& net, SampleView samples);
std::vector<std::size_t> predict_batch(const nn::DenseNetwork& net, SampleView samples,
                                       Execution exec);

// Number of worker threads the parallel kernels will use (1 without OpenMP).
int worker_threads();
void set_worker_threads(int threads);

}  // namespace xaieval::attribution
