#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ccg/model.hpp"
#include "ccg/rng.hpp"

namespace ccg {

struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

// Single content with probability one.
struct AtomPart {
  Content at;
};

// Content on the curve of type t. The gaming level has cdf
// min(1, C_t(x))^exponent; a draw of x = 0 is the origin, otherwise the
// curve point at x.
struct CurvePart {
  double t = 1.0;
  double exponent = 1.0;
};

// Quality-only content (w_cheap = 0) whose quality has cdf
// min(1, c(max(w, beta), 0))^exponent. Mass below beta sits at quality 0.
struct QualityPart {
  double beta = 0.0;
  double exponent = 1.0;
};

// Uniform density on [v_lo, v_hi] for reparameterized engagement V, with
// type t_first w.p. p_first and t_second otherwise. Content is the curve
// point of that type with engagement V - shift.
struct VtPiece {
  double v_lo = 0.0;
  double v_hi = 0.0;
  double mass = 0.0;
  double t_first = 0.0;
  double t_second = 0.0;
  double p_first = 1.0;
};

struct VtPart {
  std::vector<VtPiece> pieces;  // masses sum to 1
  double shift = 0.0;
};

using Part = std::variant<AtomPart, CurvePart, QualityPart, VtPart>;

struct Component {
  double mix_weight = 1.0;
  Part part;
};

class MixedStrategy {
 public:
  MixedStrategy(ModelInstance inst, std::vector<Component> components, std::string descriptor);

  const ModelInstance& instance() const { return inst_; }
  const std::vector<Component>& components() const { return components_; }
  const std::string& descriptor() const { return descriptor_; }

  Content sample(Stream& rng) const;
  // Exact mixture cdf of W_cheap.
  double cheap_marginal_cdf(double x) const;
  std::string to_json() const;

 private:
  ModelInstance inst_;
  std::vector<Component> components_;
  std::vector<double> cumulative_;
  std::string descriptor_;
};

inline Content sample_content(const MixedStrategy& s, Stream& rng) { return s.sample(rng); }
inline double cheap_marginal_cdf(const MixedStrategy& s, double x) {
  return s.cheap_marginal_cdf(x);
}

// Homogeneous users, engagement-based ranking.
MixedStrategy engagement_eq_homogeneous(const ModelInstance& inst, int P);
// Two user types, P = 2, costless gaming.
MixedStrategy engagement_eq_two_types(const ModelInstance& inst);
// N well-separated user types, P = 2, costless gaming.
MixedStrategy engagement_eq_well_separated(const ModelInstance& inst);
// Picks one of the three above from the number of types.
MixedStrategy engagement_eq(const ModelInstance& inst, int P);

// Investment-based ranking.
MixedStrategy investment_eq(const ModelInstance& inst, int P);
// Random recommendations.
MixedStrategy random_eq(const ModelInstance& inst, int P);

// The unique nu in [0, 1] with sum_{i<P} nu^i = P kappa (0 when kappa <= 1/P).
double random_opt_out_probability(double kappa, int P);

// Which of the three two-type regimes applies at ratio a_t1 / a_t2.
int two_type_case(double ratio);

int n_prime(int N);
std::vector<double> well_separated_mix_weights(int N);
TypeSpace make_well_separated_types(int N, double eps);

}  // namespace ccg
