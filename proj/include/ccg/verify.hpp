#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccg/equilibrium.hpp"
#include "ccg/game.hpp"
#include "ccg/stats.hpp"

namespace ccg {

struct BestResponseReport {
  MetricEstimate eq_utility;              // mean over on-support probes
  MetricEstimate best_deviation_utility;  // best candidate deviation
  double gap = 0.0;                       // best deviation mean - eq mean
  double threshold = 0.0;                 // max(0.02, 4 * combined stderr)
  Content argmax_candidate;
  int grid_size = 0;
  std::uint64_t samples_per_candidate = 0;
  std::vector<Content> candidates;
  std::vector<MetricEstimate> candidate_utilities;
  std::vector<Content> probes;
  std::vector<MetricEstimate> probe_utilities;

  bool accepted() const { return gap <= threshold; }
  std::string to_json() const;
};

// The origin plus K points per type curve, uniform in w_cheap from the end of
// the zero-marginal-cost stretch to where the curve cost reaches 1.2.
std::vector<Content> candidate_deviations(const ModelInstance& inst, int K);

// candidate_deviations plus, for the quality and random rankings, K points on
// the quality axis up to cost 1.2 and the minimum-investment points.
std::vector<Content> deviation_set(const ModelInstance& inst, Metric metric, int K);

inline constexpr int kProbeCount = 32;

// Utilities of every candidate and of kProbeCount on-support probes against
// the same n pre-sampled opponent landscapes (common random numbers).
BestResponseReport best_response_gap(const ModelInstance& inst, Metric metric,
                                     const MixedStrategy& strategy, int P, int K, std::uint64_t n,
                                     std::uint64_t seed, Exec exec = Exec::parallel);

// Pairs (i, j) with w_cheap_j >= w_cheap_i but w_costly_j < w_costly_i - tol.
std::vector<std::pair<std::size_t, std::size_t>> check_positive_correlation(
    std::span<const Content> samples, double tol);

// Indices of samples farther than tol from every type curve and from the origin.
std::vector<std::size_t> support_containment(std::span<const Content> samples,
                                             const ModelInstance& inst, double tol);

}  // namespace ccg
