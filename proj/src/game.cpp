#include "ccg/game.hpp"

#include <algorithm>
#include <cmath>

namespace ccg {

double score(const ModelInstance& inst, Metric m, const Content& w) {
  switch (m) {
    case Metric::engagement:
      return inst.engagement(w);
    case Metric::investment:
      return w.w_costly;
    case Metric::random:
      return 1.0;
  }
  return 0.0;
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::engagement:
      return "engagement";
    case Metric::investment:
      return "investment";
    case Metric::random:
      return "random";
  }
  return "";
}

std::optional<Metric> parse_metric(const std::string& name) {
  if (name == "engagement") return Metric::engagement;
  if (name == "investment") return Metric::investment;
  if (name == "random") return Metric::random;
  return std::nullopt;
}

bool scores_tie(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

std::optional<std::size_t> recommend(const ModelInstance& inst, Metric metric,
                                     std::span<const Content> landscape, double t, Stream& rng) {
  if (landscape.empty()) throw PreconditionError("empty landscape");
  std::vector<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < landscape.size(); ++i) {
    if (!inst.eligible(landscape[i], t)) continue;
    const double s = score(inst, metric, landscape[i]);
    if (best.empty() || (s > best_score && !scores_tie(s, best_score))) {
      best.assign(1, i);
      best_score = s;
    } else if (scores_tie(s, best_score)) {
      best.push_back(i);
    }
  }
  if (best.empty()) return std::nullopt;
  if (best.size() == 1) return best.front();
  return best[rng.below(best.size())];
}

RoundOutcome play_round(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                        int P, Stream& rng) {
  std::vector<Content> landscape(static_cast<std::size_t>(P));
  for (auto& w : landscape) w = strategy.sample(rng);
  const auto types = inst.types();
  RoundOutcome out;
  out.user_type = types[rng.below(types.size())];
  out.winner = recommend(inst, metric, landscape, out.user_type, rng);
  if (out.winner) {
    const Content& w = landscape[*out.winner];
    out.consumed = true;
    out.engagement = inst.engagement(w);
    out.quality = w.w_costly;
    out.user_utility = inst.user_utility(w, out.user_type);
  }
  return out;
}

double win_share(const ModelInstance& inst, Metric metric, const Content& w,
                 std::span<const Content> opponents, double t) {
  if (!inst.eligible(w, t)) return 0.0;
  const double s = score(inst, metric, w);
  int tied = 1;
  for (const auto& o : opponents) {
    if (!inst.eligible(o, t)) continue;
    const double so = score(inst, metric, o);
    if (scores_tie(so, s))
      ++tied;
    else if (so > s)
      return 0.0;
  }
  return 1.0 / tied;
}

MetricEstimate expected_creator_utility(const ModelInstance& inst, Metric metric, const Content& w,
                                        const MixedStrategy& opponent_strategy, int P,
                                        std::uint64_t n, Stream& rng) {
  if (n == 0) throw PreconditionError("need at least one sample");
  const auto types = inst.types();
  std::vector<Content> opp(static_cast<std::size_t>(std::max(P - 1, 0)));
  RunningStats acc;
  for (std::uint64_t k = 0; k < n; ++k) {
    for (auto& o : opp) o = opponent_strategy.sample(rng);
    double win = 0.0;
    for (double t : types) win += win_share(inst, metric, w, opp, t);
    acc.push(win / static_cast<double>(types.size()));
  }
  auto est = acc.estimate();
  est.mean -= inst.cost(w);
  return est;
}

}  // namespace ccg
