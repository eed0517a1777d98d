// Copyright 2026 The kmsdpp Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace kmsdpp::random {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Draws per seed stream; results never depend on the worker count.
inline constexpr std::size_t kChunk = 1024;

/// mt19937_64 keyed by (seed, chunk index).
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t chunk)
      : engine_(splitmix64(seed ^ splitmix64(chunk + 0x632be59bd9b4e019ULL))) {}

  /// Uniform on [0, 1) with 53 random bits.
  [[nodiscard]] double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index drawn proportionally to nonnegative weights with positive sum.
  [[nodiscard]] std::size_t categorical(std::span<const double> weights, double total) {
    const double target = uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last = i;
      if (target < acc) return i;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
};

/// Calls fn(chunk, begin, end) over [0, count) in kChunk blocks on up to `threads` workers.
template <typename Fn>
void for_each_chunk(std::size_t count, int threads, Fn&& fn) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  const std::size_t workers =
      std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(threads, 1)));
  auto work = [&](std::size_t w) {
    for (std::size_t c = w; c < chunks; c += workers) {
      fn(c, c * kChunk, std::min(count, (c + 1) * kChunk));
    }
  };
  if (workers <= 1) {
    if (chunks > 0) work(0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  for (auto& t : pool) t.join();
}

}  // namespace kmsdpp::random
