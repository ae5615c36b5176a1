#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccg/equilibrium.hpp"
#include "ccg/model.hpp"
#include "ccg/rng.hpp"
#include "ccg/stats.hpp"

namespace ccg {

// Platform ranking rule.
enum class Metric { engagement, investment, random };

double score(const ModelInstance& inst, Metric m, const Content& w);
std::string metric_name(Metric m);
std::optional<Metric> parse_metric(const std::string& name);

// Scores equal within this relative tolerance are ties.
bool scores_tie(double a, double b);

struct RoundOutcome {
  std::optional<std::size_t> winner;
  bool consumed = false;
  double engagement = 0.0;
  double quality = 0.0;
  double user_utility = 0.0;
  double user_type = 0.0;
};

// Index of the recommended content, uniform among the eligible top scorers;
// nullopt when no content is eligible for type t. Throws PreconditionError on
// an empty landscape.
std::optional<std::size_t> recommend(const ModelInstance& inst, Metric metric,
                                     std::span<const Content> landscape, double t, Stream& rng);

RoundOutcome play_round(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                        int P, Stream& rng);

// Expected share of the recommendation won by w against fixed opponents for a
// user of type t, with ties split evenly. Zero when w is ineligible.
double win_share(const ModelInstance& inst, Metric metric, const Content& w,
                 std::span<const Content> opponents, double t);

// Monte Carlo estimate of E[1[eligible] * win share] - c(w) with P - 1
// opponents drawn from opponent_strategy; the user type is averaged exactly.
MetricEstimate expected_creator_utility(const ModelInstance& inst, Metric metric, const Content& w,
                                        const MixedStrategy& opponent_strategy, int P,
                                        std::uint64_t n, Stream& rng);

}  // namespace ccg
