#include "xaieval/attribution/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "xaieval/core/error.hpp"

namespace xaieval::attribution {

namespace {

void check_batch(const nn::DenseNetwork& net, SampleView samples,
                 std::span<const std::size_t> targets) {
  if (samples.dim != net.input_dim())
    throw ShapeError("sample width " + std::to_string(samples.dim) + " does not match network input " +
                     std::to_string(net.input_dim()));
  if (samples.values.size() % samples.dim != 0)
    throw ShapeError("sample block is not a whole number of rows");
  if (targets.size() != samples.rows())
    throw ShapeError("need one target class per sample");
  for (std::size_t t : targets)
    if (t >= net.num_classes()) throw InvalidArgument("target class out of range");
}

}  // namespace

std::vector<Attribution> explain_batch_serial(const nn::DenseNetwork& net, SampleView samples,
                                              std::span<const std::size_t> targets, Method method,
                                              const AttributionParams& params) {
  check_batch(net, samples, targets);
  std::vector<Attribution> out;
  out.reserve(samples.rows());
  for (std::size_t r = 0; r < samples.rows(); ++r) {
    out.push_back(explain(net, samples.row(r), targets[r], method, params));
    out.back().instance_id = std::to_string(r);
  }
  return out;
}

std::vector<Attribution> explain_batch_parallel(const nn::DenseNetwork& net, SampleView samples,
                                                std::span<const std::size_t> targets, Method method,
                                                const AttributionParams& params) {
  check_batch(net, samples, targets);
  const auto n = static_cast<std::ptrdiff_t>(samples.rows());
  std::vector<Attribution> out(samples.rows());
  std::vector<std::exception_ptr> errors(samples.rows());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    const auto row = static_cast<std::size_t>(r);
    try {
      out[row] = explain(net, samples.row(row), targets[row], method, params);
      out[row].instance_id = std::to_string(row);
    } catch (...) {
      errors[row] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<Attribution> explain_batch(const nn::DenseNetwork& net, SampleView samples,
                                       std::span<const std::size_t> targets, Method method,
                                       const AttributionParams& params, Execution exec) {
  return exec == Execution::Serial ? explain_batch_serial(net, samples, targets, method, params)
                                   : explain_batch_parallel(net, samples, targets, method, params);
}

std::vector<std::size_t> predict_batch_serial(const nn::DenseNetwork& net, SampleView samples) {
  if (samples.dim != net.input_dim()) throw ShapeError("sample width does not match network input");
  std::vector<std::size_t> out(samples.rows());
  for (std::size_t r = 0; r < samples.rows(); ++r) out[r] = nn::predict(net, samples.row(r));
  return out;
}

std::vector<std::size_t> predict_batch_parallel(const nn::DenseNetwork& net, SampleView samples) {
  if (samples.dim != net.input_dim()) throw ShapeError("sample width does not match network input");
  const auto n = static_cast<std::ptrdiff_t>(samples.rows());
  std::vector<std::size_t> out(samples.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < n; ++r)
    out[static_cast<std::size_t>(r)] = nn::predict(net, samples.row(static_cast<std::size_t>(r)));
  return out;
}

std::vector<std::size_t> predict_batch(const nn::DenseNetwork& net, SampleView samples,
                                       Execution exec) {
  return exec == Execution::Serial ? predict_batch_serial(net, samples)
                                   : predict_batch_parallel(net, samples);
}

int worker_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_worker_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

}  // namespace xaieval::attribution
