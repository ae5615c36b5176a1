#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "ccg/rng.hpp"

namespace ccg {

// Monte Carlo mean with standard error (sample sd / sqrt(n)).
struct MetricEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n = 0;
};

// Welford accumulator; merge() combines partial results (Chan et al.).
class RunningStats {
 public:
  void push(double x);
  void merge(const RunningStats& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;
  MetricEstimate estimate() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

enum class Exec { serial, parallel };

// Fixed shard count for Monte Carlo loops. Shard k owns the random stream
// (seed, k) and a fixed slice of the samples; partial statistics are merged
// in shard order, so results do not depend on thread count or Exec.
inline constexpr int kShards = 64;

std::uint64_t shard_begin(std::uint64_t n, int shard);

// Runs draw(stream) -> std::array<double, K> for n samples split across the
// fixed shards and returns the merged per-coordinate statistics.
template <std::size_t K, class Draw>
std::array<RunningStats, K> sharded_accumulate(std::uint64_t seed, std::uint64_t n, Exec exec,
                                               const Draw& draw) {
  std::array<std::array<RunningStats, K>, kShards> parts{};
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int s = 0; s < kShards; ++s) {
    Stream rng(seed, static_cast<std::uint64_t>(s));
    const std::uint64_t end = shard_begin(n, s + 1);
    for (std::uint64_t i = shard_begin(n, s); i < end; ++i) {
      const std::array<double, K> x = draw(rng);
      for (std::size_t k = 0; k < K; ++k) parts[s][k].push(x[k]);
    }
  }
  std::array<RunningStats, K> total{};
  for (const auto& p : parts)
    for (std::size_t k = 0; k < K; ++k) total[k].merge(p[k]);
  return total;
}

}  // namespace ccg
