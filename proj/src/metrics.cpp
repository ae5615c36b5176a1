#include "ccg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ccg {

namespace {

// Consumption-gated winner quantities for one landscape, averaged over types
// and over tied winners.
std::array<double, 3> landscape_outcome(const ModelInstance& inst, Metric metric,
                                        std::span<const Content> landscape) {
  const auto types = inst.types();
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  for (double t : types) {
    double best = 0.0;
    bool any = false;
    std::array<double, 3> sum{0.0, 0.0, 0.0};
    int tied = 0;
    for (const auto& w : landscape) {
      if (!inst.eligible(w, t)) continue;
      const double u = inst.user_utility(w, t);
      const double s = score(inst, metric, w);
      if (!any || (s > best && !scores_tie(s, best))) {
        any = true;
        best = s;
        tied = 0;
        sum = {0.0, 0.0, 0.0};
      } else if (!scores_tie(s, best)) {
        continue;
      }
      ++tied;
      sum[0] += w.w_costly;
      sum[1] += inst.engagement(w);
      sum[2] += u;
    }
    if (tied > 0)
      for (std::size_t k = 0; k < 3; ++k) acc[k] += sum[k] / tied;
  }
  for (auto& a : acc) a /= static_cast<double>(types.size());
  return acc;
}

struct Quadrature {
  const std::function<double(double)>& cdf;
  int P;

  double g(double v) const {
    const double f = std::clamp(cdf(v), 0.0, 1.0);
    return 1.0 - std::pow(f, P);
  }

  static void check_monotone(double ga, double gm, double gb) {
    if (gm > ga + 1e-12 || gb > gm + 1e-12) throw std::invalid_argument("cdf is not monotone");
  }

  double simpson(double a, double b, double ga, double gm, double gb) const {
    return (b - a) / 6.0 * (ga + 4.0 * gm + gb);
  }

  double adapt(double a, double b, double ga, double gm, double gb, double whole, double tol,
               int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double glm = g(lm), grm = g(rm);
    check_monotone(ga, glm, gm);
    check_monotone(gm, grm, gb);
    const double left = simpson(a, m, ga, glm, gm);
    const double right = simpson(m, b, gm, grm, gb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return adapt(a, m, ga, glm, gm, left, tol / 2, depth - 1) +
           adapt(m, b, gm, grm, gb, right, tol / 2, depth - 1);
  }

  double panel(double a, double b, double tol) const {
    const double ga = g(a), gm = g(0.5 * (a + b)), gb = g(b);
    check_monotone(ga, gm, gb);
    return adapt(a, b, ga, gm, gb, simpson(a, b, ga, gm, gb), tol, 50);
  }
};

}  // namespace

OutcomeMetrics estimate_outcome_metrics(const ModelInstance& inst, Metric metric,
                                        const MixedStrategy& strategy, int P, std::uint64_t n,
                                        std::uint64_t seed, Exec exec) {
  if (n == 0) throw PreconditionError("need at least one sample");
  if (P < 1) throw PreconditionError("P must be positive");
  const auto stats = sharded_accumulate<3>(seed, n, exec, [&](Stream& rng) {
    std::vector<Content> landscape(static_cast<std::size_t>(P));
    for (auto& w : landscape) w = strategy.sample(rng);
    return landscape_outcome(inst, metric, landscape);
  });
  return {stats[0].estimate(), stats[1].estimate(), stats[2].estimate()};
}

MetricEstimate estimate_ucq(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                            int P, std::uint64_t n, std::uint64_t seed, Exec exec) {
  return estimate_outcome_metrics(inst, metric, strategy, P, n, seed, exec).ucq;
}

MetricEstimate estimate_re(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                           int P, std::uint64_t n, std::uint64_t seed, Exec exec) {
  return estimate_outcome_metrics(inst, metric, strategy, P, n, seed, exec).re;
}

MetricEstimate estimate_uw(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                           int P, std::uint64_t n, std::uint64_t seed, Exec exec) {
  return estimate_outcome_metrics(inst, metric, strategy, P, n, seed, exec).uw;
}

double investment_engagement_cdf(double v) { return std::clamp(v - 1.0, 0.0, 1.0); }

double limit_engagement_cdf(double v, double eps) {
  const double lo = 1.0 + eps;
  if (v <= lo) return 0.0;
  const double inner = 1.0 - std::log(v / lo);
  if (inner <= std::exp(-1.0)) return 1.0;
  return std::clamp(-std::log(inner), 0.0, 1.0);
}

double expected_max_from_cdf(const std::function<double(double)>& cdf, int P, double upper,
                             double tol, std::span<const double> breakpoints) {
  if (P < 1) throw std::invalid_argument("P must be positive");
  if (!(upper > 0.0)) return 0.0;
  std::vector<double> cuts{0.0, upper};
  constexpr int kPanels = 16;
  for (int i = 1; i < kPanels; ++i) cuts.push_back(upper * i / kPanels);
  for (double b : breakpoints)
    if (b > 0.0 && b < upper) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const Quadrature q{cdf, P};
  const double panel_tol = tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  double prev_g = q.g(0.0);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double ga = q.g(cuts[i]);
    Quadrature::check_monotone(prev_g, ga, ga);
    prev_g = ga;
    total += q.panel(cuts[i], cuts[i + 1], panel_tol);
  }
  return total;
}

double homogeneous_quality_cdf(double alpha, double gamma, double t, int P, double w) {
  if (w < 0.0) return 0.0;
  // Qualities below max(0, -alpha) only occur at the origin atom.
  const double x = std::max(w, std::max(0.0, -alpha));
  const double c = std::min(1.0, x + gamma * t * (x + alpha));
  return std::pow(std::max(c, 0.0), 1.0 / (P - 1));
}

double closed_form_ucq_homogeneous(double alpha, double gamma, double t, int P) {
  const double w0 = std::max(0.0, -alpha);
  const double w1 = (1.0 - gamma * t * alpha) / (1.0 + gamma * t);
  if (w1 <= 0.0) return 0.0;
  const double bps[] = {w0, w1};
  return expected_max_from_cdf(
      [=](double w) { return homogeneous_quality_cdf(alpha, gamma, t, P, w); }, P,
      std::max(w0, w1), 1e-10, bps);
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double x = samples[i];
    const double below = cdf(std::nextafter(x, -std::numeric_limits<double>::infinity()));
    d = std::max({d, std::abs(static_cast<double>(i) / n - below),
                  std::abs(static_cast<double>(j) / n - cdf(x))});
    i = j;
  }
  return d;
}

}  // namespace ccg
