#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace xaieval {

// mt19937_64 is specified bit-exactly by the standard; the distributions are
// not, so the helpers below derive values from raw engine output directly.
using Rng = std::mt19937_64;

// Mixes a 64-bit value (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

// Seed for sub-task `index` of a run seeded with `master`. Parallel and
// serial drivers both use this so their results coincide.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Uniform in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Standard normal via Box-Muller on uniform01.
double standard_normal(Rng& rng);

// Fisher-Yates shuffle driven by uniform_index.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  shuffle(std::span<T>(values), rng);
}

// `count` indices in [0, population). Without replacement when possible;
// `with_replacement` reports whether the population had to be resampled.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count,
                                        std::uint64_t seed, bool* with_replacement = nullptr);

}  // namespace xaieval
