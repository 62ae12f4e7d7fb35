// Serial vs OpenMP batch attribution on a random MLP.
//
//   bench_batch [samples] [repeats]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "xaieval/attribution/batch.hpp"
#include "xaieval/core/random.hpp"
#include "xaieval/nn/network.hpp"
#include "xaieval/nn/train.hpp"

using namespace xaieval;
using attribution::Method;

namespace {

template <typename Fn>
double median_seconds(int repeats, Fn&& fn) {
  std::vector<double> t;
  for (int r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 2000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  const std::size_t d = 57;
  const auto net = nn::initialize(d, 5, {{32, 16}}, nn::default_feature_names(d), 1);

  Rng rng(2);
  std::vector<double> values(n * d);
  for (double& v : values) v = uniform01(rng);
  const attribution::SampleView samples{values, d};
  const auto targets = attribution::predict_batch_serial(net, samples);
  const attribution::AttributionParams params;

  std::printf("samples=%zu dim=%zu threads=%d repeats=%d\n", n, d, attribution::worker_threads(), repeats);
  std::printf("%-10s %12s %12s %8s %s\n", "method", "serial_s", "parallel_s", "speedup", "identical");
  for (Method m : attribution::kAllMethods) {
    std::vector<attribution::Attribution> a, b;
    const double ts = median_seconds(repeats, [&] { a = attribution::explain_batch_serial(net, samples, targets, m, params); });
    const double tp = median_seconds(repeats, [&] { b = attribution::explain_batch_parallel(net, samples, targets, m, params); });
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a[i].scores == b[i].scores;
    std::printf("%-10s %12.4e %12.4e %8.2f %s\n", attribution::to_string(m), ts, tp, ts / tp, same ? "yes" : "NO");
  }
}
