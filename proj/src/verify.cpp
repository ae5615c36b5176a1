#include "ccg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <json.hpp>

namespace ccg {

namespace {

constexpr double kCostCap = 1.2;
constexpr std::uint64_t kProbeStream = 1'000'003;

// Opponent landscapes flattened as n rows of P - 1 contents, with scores and
// per-type eligibility precomputed.
struct Landscapes {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<double> score;
  std::vector<std::vector<std::uint8_t>> eligible;  // [type][row * width + j]
};

Landscapes sample_landscapes(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                             int P, std::uint64_t n, std::uint64_t seed, Exec exec) {
  Landscapes L;
  L.rows = n;
  L.width = static_cast<std::size_t>(P - 1);
  std::vector<Content> opp(L.rows * L.width);
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (int s = 0; s < kShards; ++s) {
    Stream rng(seed, static_cast<std::uint64_t>(s));
    for (std::uint64_t r = shard_begin(n, s); r < shard_begin(n, s + 1); ++r)
      for (std::size_t j = 0; j < L.width; ++j) opp[r * L.width + j] = strategy.sample(rng);
  }
  L.score.resize(opp.size());
  for (std::size_t k = 0; k < opp.size(); ++k) L.score[k] = score(inst, metric, opp[k]);
  for (double t : inst.types()) {
    std::vector<std::uint8_t> e(opp.size());
    for (std::size_t k = 0; k < opp.size(); ++k) e[k] = inst.eligible(opp[k], t);
    L.eligible.push_back(std::move(e));
  }
  return L;
}

// Per-landscape type-averaged win share of w; written into out (size rows).
void win_shares(const ModelInstance& inst, Metric metric, const Content& w, const Landscapes& L,
                std::vector<double>& out) {
  const auto types = inst.types();
  const double s = score(inst, metric, w);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t ti = 0; ti < types.size(); ++ti) {
    if (!inst.eligible(w, types[ti])) continue;
    const auto& elig = L.eligible[ti];
    for (std::size_t r = 0; r < L.rows; ++r) {
      int tied = 1;
      bool lost = false;
      for (std::size_t j = 0; j < L.width; ++j) {
        const std::size_t k = r * L.width + j;
        if (!elig[k]) continue;
        if (scores_tie(L.score[k], s)) {
          ++tied;
        } else if (L.score[k] > s) {
          lost = true;
          break;
        }
      }
      if (!lost) out[r] += 1.0 / tied;
    }
  }
  const double inv = 1.0 / static_cast<double>(types.size());
  for (auto& x : out) x *= inv;
}

MetricEstimate utility_estimate(std::span<const double> shares, double cost) {
  RunningStats acc;
  for (double x : shares) acc.push(x);
  auto e = acc.estimate();
  e.mean -= cost;
  return e;
}

nlohmann::json estimate_json(const MetricEstimate& e) {
  return {{"mean", e.mean}, {"stderr", e.std_error}, {"n", e.n}};
}

}  // namespace

std::vector<Content> candidate_deviations(const ModelInstance& inst, int K) {
  if (K < 2) throw PreconditionError("grid needs at least 2 points per curve");
  std::vector<Content> out{Content{}};
  for (double t : inst.types()) {
    const double lo = curve_flat_end(inst, t);
    const double hi = std::max(lo, curve_cost_inverse(inst, t, kCostCap));
    for (int i = 0; i < K; ++i) out.push_back(curve_point(inst, t, lo + (hi - lo) * i / (K - 1)));
  }
  return out;
}

std::vector<Content> deviation_set(const ModelInstance& inst, Metric metric, int K) {
  auto out = candidate_deviations(inst, K);
  if (metric == Metric::engagement) return out;
  // c(q, 0) = q, so the quality axis reaches cost 1.2 at q = 1.2.
  for (int i = 0; i < K; ++i) out.push_back(Content{kCostCap * i / (K - 1), 0.0});
  for (double t : inst.types()) out.push_back(Content{beta_t(inst, t), 0.0});
  return out;
}

BestResponseReport best_response_gap(const ModelInstance& inst, Metric metric,
                                     const MixedStrategy& strategy, int P, int K, std::uint64_t n,
                                     std::uint64_t seed, Exec exec) {
  if (n == 0) throw PreconditionError("need at least one sample");
  if (P < 2) throw PreconditionError("P must be at least 2");
  const Landscapes L = sample_landscapes(inst, metric, strategy, P, n, seed, exec);

  BestResponseReport rep;
  rep.grid_size = K;
  rep.samples_per_candidate = n;
  rep.candidates = deviation_set(inst, metric, K);
  Stream probe_rng(seed, kProbeStream);
  for (int i = 0; i < kProbeCount; ++i) rep.probes.push_back(strategy.sample(probe_rng));

  const auto n_cand = static_cast<std::ptrdiff_t>(rep.candidates.size());
  rep.candidate_utilities.resize(rep.candidates.size());
  const bool parallel = exec == Exec::parallel;
#pragma omp parallel if (parallel)
  {
    std::vector<double> shares(n);
#pragma omp for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n_cand; ++i) {
      win_shares(inst, metric, rep.candidates[i], L, shares);
      rep.candidate_utilities[i] = utility_estimate(shares, inst.cost(rep.candidates[i]));
    }
  }

  // Equilibrium utility: per-landscape mean over the probes.
  std::vector<double> probe_sum(n, 0.0);
  std::vector<double> shares(n);
  for (const auto& w : rep.probes) {
    win_shares(inst, metric, w, L, shares);
    const double c = inst.cost(w);
    rep.probe_utilities.push_back(utility_estimate(shares, c));
    for (std::size_t r = 0; r < n; ++r) probe_sum[r] += shares[r] - c;
  }
  RunningStats eq;
  for (double x : probe_sum) eq.push(x / kProbeCount);
  rep.eq_utility = eq.estimate();

  std::size_t best = 0;
  for (std::size_t i = 1; i < rep.candidate_utilities.size(); ++i)
    if (rep.candidate_utilities[i].mean > rep.candidate_utilities[best].mean) best = i;
  rep.best_deviation_utility = rep.candidate_utilities[best];
  rep.argmax_candidate = rep.candidates[best];
  rep.gap = rep.best_deviation_utility.mean - rep.eq_utility.mean;
  const double se = std::hypot(rep.best_deviation_utility.std_error, rep.eq_utility.std_error);
  rep.threshold = std::max(0.02, 4.0 * se);
  return rep;
}

std::string BestResponseReport::to_json() const {
  using nlohmann::json;
  json j;
  j["eq_utility"] = estimate_json(eq_utility);
  j["best_deviation_utility"] = estimate_json(best_deviation_utility);
  j["gap"] = gap;
  j["threshold"] = threshold;
  j["accepted"] = accepted();
  j["argmax_candidate"] = {argmax_candidate.w_costly, argmax_candidate.w_cheap};
  j["grid_size"] = grid_size;
  j["samples_per_candidate"] = samples_per_candidate;
  json cands = json::array();
  for (std::size_t i = 0; i < candidates.size(); ++i)
    cands.push_back({{"content", {candidates[i].w_costly, candidates[i].w_cheap}},
                     {"utility", estimate_json(candidate_utilities[i])}});
  j["candidates"] = cands;
  json probes_j = json::array();
  for (std::size_t i = 0; i < probes.size(); ++i)
    probes_j.push_back({{"content", {probes[i].w_costly, probes[i].w_cheap}},
                        {"utility", estimate_json(probe_utilities[i])}});
  j["probes"] = probes_j;
  return j.dump(2);
}

std::vector<std::pair<std::size_t, std::size_t>> check_positive_correlation(
    std::span<const Content> samples, double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const Content& a = samples[i];
      const Content& b = samples[j];
      if (b.w_cheap >= a.w_cheap && b.w_costly < a.w_costly - tol)
        bad.emplace_back(i, j);
      else if (a.w_cheap >= b.w_cheap && a.w_costly < b.w_costly - tol)
        bad.emplace_back(j, i);
    }
  }
  return bad;
}

std::vector<std::size_t> support_containment(std::span<const Content> samples,
                                             const ModelInstance& inst, double tol) {
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Content& w = samples[i];
    if (std::abs(w.w_costly) <= tol && std::abs(w.w_cheap) <= tol) continue;
    const auto types = inst.types();
    const bool on_curve = std::any_of(types.begin(), types.end(), [&](double t) {
      return std::abs(w.w_costly - min_investment(inst, t, w.w_cheap)) <= tol;
    });
    if (!on_curve) bad.push_back(i);
  }
  return bad;
}

}  // namespace ccg
