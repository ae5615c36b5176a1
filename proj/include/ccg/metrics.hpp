#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ccg/equilibrium.hpp"
#include "ccg/game.hpp"
#include "ccg/stats.hpp"

namespace ccg {

// User consumption of quality, realized engagement and user welfare,
// estimated together from the same landscapes.
struct OutcomeMetrics {
  MetricEstimate ucq;
  MetricEstimate re;
  MetricEstimate uw;
};

// Each sample draws P contents from the strategy and averages the
// consumption-gated winner quantity exactly over user types and over ties.
OutcomeMetrics estimate_outcome_metrics(const ModelInstance& inst, Metric metric,
                                        const MixedStrategy& strategy, int P, std::uint64_t n,
                                        std::uint64_t seed, Exec exec = Exec::parallel);

MetricEstimate estimate_ucq(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                            int P, std::uint64_t n, std::uint64_t seed, Exec exec = Exec::parallel);
MetricEstimate estimate_re(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                           int P, std::uint64_t n, std::uint64_t seed, Exec exec = Exec::parallel);
MetricEstimate estimate_uw(const ModelInstance& inst, Metric metric, const MixedStrategy& strategy,
                           int P, std::uint64_t n, std::uint64_t seed, Exec exec = Exec::parallel);

// cdf of M^E + s under the investment equilibrium (linear, alpha = 1, gamma = 0, P = 2).
double investment_engagement_cdf(double v);
// Large-N limit of the cdf of M^E + s under the well-separated equilibrium.
double limit_engagement_cdf(double v, double eps);

// E[max of P iid draws] = integral over [0, upper] of 1 - F^P, by adaptive
// Simpson. Breakpoints (kinks or jumps of F) start new panels. Throws
// std::invalid_argument if F decreases on the quadrature nodes.
double expected_max_from_cdf(const std::function<double(double)>& cdf, int P, double upper,
                             double tol = 1e-8, std::span<const double> breakpoints = {});

// Quality cdf of the homogeneous engagement equilibrium in the linear family.
double homogeneous_quality_cdf(double alpha, double gamma, double t, int P, double w);
// E[max quality of P draws] under that cdf.
double closed_form_ucq_homogeneous(double alpha, double gamma, double t, int P);

// Kolmogorov-Smirnov distance between a sample and a cdf (atoms allowed).
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace ccg
