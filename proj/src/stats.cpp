#include "ccg/stats.hpp"

#include <cmath>

namespace ccg {

void RunningStats::push(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += o.m2_ + d * d * na * nb / n;
  n_ += o.n_;
}

double RunningStats::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

MetricEstimate RunningStats::estimate() const {
  MetricEstimate e;
  e.mean = mean_;
  e.n = n_;
  e.std_error = n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  return e;
}

std::uint64_t shard_begin(std::uint64_t n, int shard) {
  const std::uint64_t k = static_cast<std::uint64_t>(shard);
  const std::uint64_t base = n / kShards, extra = n % kShards;
  return k * base + (k < extra ? k : extra);
}

}  // namespace ccg
