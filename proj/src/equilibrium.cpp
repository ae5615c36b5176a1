#include "ccg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

namespace ccg {

namespace {

constexpr double kWeightTol = 1e-12;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double quality_cost(double q) {
  // c(q, 0) = q for both families.
  return q;
}

void require_single_type(const ModelInstance& inst, const char* what) {
  if (inst.type_space().size() != 1)
    throw PreconditionError(std::string(what) + " needs a single user type");
}

void require_P(int P) {
  if (P < 2) throw PreconditionError("P must be at least 2");
}

// Common checks for the costless-gaming heterogeneous constructions.
LinearityParams require_linear_costless(const ModelInstance& inst, const char* what) {
  const auto lp = linearity_params(inst);
  if (!lp) throw PreconditionError(std::string(what) + " needs costless gaming with linear induced costs");
  for (double t : inst.types())
    if (!inst.eligible(Content{}, t))
      throw PreconditionError(std::string(what) + " needs nonnegative baseline utility");
  return *lp;
}

Content sample_vt(const ModelInstance& inst, const VtPart& vt, Stream& rng) {
  double u = rng.uniform();
  const VtPiece* chosen = &vt.pieces.back();
  for (const auto& p : vt.pieces) {
    if (u < p.mass) {
      chosen = &p;
      break;
    }
    u -= p.mass;
  }
  const double v = chosen->v_lo + rng.uniform() * (chosen->v_hi - chosen->v_lo);
  const double t = rng.uniform() < chosen->p_first ? chosen->t_first : chosen->t_second;
  return reparam_to_content(inst, v, t);
}

struct PartSampler {
  const ModelInstance& inst;
  Stream& rng;

  Content operator()(const AtomPart& a) const { return a.at; }
  Content operator()(const CurvePart& c) const {
    const double y = std::pow(rng.uniform(), 1.0 / c.exponent);
    const double x = curve_cost_inverse(inst, c.t, y);
    return x > 0.0 ? curve_point(inst, c.t, x) : Content{};
  }
  Content operator()(const QualityPart& q) const {
    const double y = std::pow(rng.uniform(), 1.0 / q.exponent);
    if (y <= quality_cost(q.beta)) return Content{};
    return Content{y, 0.0};
  }
  Content operator()(const VtPart& vt) const { return sample_vt(inst, vt, rng); }
};

struct PartCheapCdf {
  const ModelInstance& inst;
  double x;

  double operator()(const AtomPart& a) const { return a.at.w_cheap <= x ? 1.0 : 0.0; }
  double operator()(const CurvePart& c) const {
    return std::pow(std::min(1.0, curve_cost(inst, c.t, x)), c.exponent);
  }
  double operator()(const QualityPart&) const { return 1.0; }
  double operator()(const VtPart& vt) const {
    double total = 0.0;
    for (const auto& p : vt.pieces) {
      auto frac = [&](double t) {
        const double thr = curve_engagement(inst, t, x) + vt.shift;
        if (p.v_hi <= p.v_lo) return thr >= p.v_lo ? 1.0 : 0.0;
        return clamp01((thr - p.v_lo) / (p.v_hi - p.v_lo));
      };
      double f = p.p_first * frac(p.t_first);
      if (p.p_first < 1.0) f += (1.0 - p.p_first) * frac(p.t_second);
      total += p.mass * f;
    }
    return total;
  }
};

}  // namespace

MixedStrategy::MixedStrategy(ModelInstance inst, std::vector<Component> components,
                             std::string descriptor)
    : inst_(std::move(inst)), components_(std::move(components)), descriptor_(std::move(descriptor)) {
  if (components_.empty()) throw PreconditionError("strategy has no components");
  double acc = 0.0;
  for (const auto& c : components_) {
    if (c.mix_weight < 0.0) throw PreconditionError("negative mixture weight");
    acc += c.mix_weight;
    cumulative_.push_back(acc);
  }
  if (std::abs(acc - 1.0) > kWeightTol) throw PreconditionError("mixture weights do not sum to 1");
}

Content MixedStrategy::sample(Stream& rng) const {
  std::size_t k = 0;
  if (components_.size() > 1) {
    const double u = rng.uniform() * cumulative_.back();
    k = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                 cumulative_.begin());
    k = std::min(k, components_.size() - 1);
  }
  return std::visit(PartSampler{inst_, rng}, components_[k].part);
}

double MixedStrategy::cheap_marginal_cdf(double x) const {
  if (x < 0.0) return 0.0;
  double total = 0.0;
  for (const auto& c : components_) total += c.mix_weight * std::visit(PartCheapCdf{inst_, x}, c.part);
  return clamp01(total);
}

std::string MixedStrategy::to_json() const {
  using nlohmann::json;
  json j;
  j["descriptor"] = descriptor_;
  j["model"] = inst_.describe();
  j["components"] = json::array();
  for (const auto& c : components_) {
    json cj;
    cj["mix_weight"] = c.mix_weight;
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, AtomPart>) {
            cj["kind"] = "atom";
            cj["content"] = {p.at.w_costly, p.at.w_cheap};
          } else if constexpr (std::is_same_v<T, CurvePart>) {
            cj["kind"] = "curve";
            cj["type"] = p.t;
            cj["exponent"] = p.exponent;
            // (w_cheap, cdf) at the start, the end of the flat part and where the cdf reaches 1.
            json bp = json::array();
            for (double x : {0.0, curve_flat_end(inst_, p.t), curve_cost_inverse(inst_, p.t, 1.0)})
              bp.push_back({x, std::pow(std::min(1.0, curve_cost(inst_, p.t, x)), p.exponent)});
            cj["breakpoints"] = bp;
          } else if constexpr (std::is_same_v<T, QualityPart>) {
            cj["kind"] = "quality";
            cj["beta"] = p.beta;
            cj["exponent"] = p.exponent;
          } else {
            cj["kind"] = "vt_density";
            cj["shift"] = p.shift;
            json pieces = json::array();
            for (const auto& pc : p.pieces)
              pieces.push_back({{"v_lo", pc.v_lo},
                                {"v_hi", pc.v_hi},
                                {"mass", pc.mass},
                                {"t_first", pc.t_first},
                                {"t_second", pc.t_second},
                                {"p_first", pc.p_first}});
            cj["pieces"] = pieces;
          }
        },
        c.part);
    j["components"].push_back(cj);
  }
  return j.dump(2);
}

MixedStrategy engagement_eq_homogeneous(const ModelInstance& inst, int P) {
  require_single_type(inst, "homogeneous engagement equilibrium");
  require_P(P);
  const double t = inst.types()[0];
  return MixedStrategy(inst, {Component{1.0, CurvePart{t, 1.0 / (P - 1)}}}, "engagement_homogeneous");
}

int two_type_case(double ratio) {
  if (!(ratio > 1.0)) throw PreconditionError("two-type ratio must exceed 1");
  if (ratio >= 1.5) return 1;
  if (ratio >= (5.0 - std::sqrt(5.0)) / 2.0) return 2;
  return 3;
}

MixedStrategy engagement_eq_two_types(const ModelInstance& inst) {
  if (inst.type_space().size() != 2) throw PreconditionError("two-type equilibrium needs exactly 2 types");
  const auto lp = require_linear_costless(inst, "two-type equilibrium");
  const double t1 = inst.types()[0], t2 = inst.types()[1];
  const double a1 = lp.a[0], a2 = lp.a[1];
  const double r = a1 / a2;
  VtPart vt;
  vt.shift = lp.s;
  switch (two_type_case(r)) {
    case 1:
      vt.pieces = {{1.0 / a1, 1.5 / a1, 0.5, t1, t2, 1.0}, {1.0 / a2, 1.25 / a2, 0.5, t2, t2, 1.0}};
      break;
    case 2: {
      const double split = 1.0 / (2.0 * a2 * (r - 1.0));
      const double top = (2.0 - r / 2.0) / a2;
      vt.pieces = {{1.0 / a1, 1.0 / a2, r - 1.0, t1, t2, 1.0},
                   {1.0 / a2, split, 2.0 * a2 * (split - 1.0 / a2), t1, t2, r - 1.0},
                   {split, top, 2.0 * a2 * (top - split), t2, t2, 1.0}};
      break;
    }
    default: {
      const double x3 = (3.0 - r) / (2.0 * a2 * (2.0 - r));
      const double x4 = 1.0 / a1 + (1.0 / a1 - 1.0 / (2.0 * a2)) * (3.0 - r) / (2.0 - r);
      vt.pieces = {{1.0 / a1, 1.0 / a2, r - 1.0, t1, t2, 1.0},
                   {1.0 / a2, x3, 2.0 * a2 * (x3 - 1.0 / a2), t1, t2, r - 1.0},
                   {x3, x4, a1 * (x4 - x3), t1, t2, 1.0}};
      break;
    }
  }
  // Renormalize away rounding so the piece masses sum to exactly 1.
  double total = 0.0;
  for (const auto& p : vt.pieces) total += p.mass;
  for (auto& p : vt.pieces) p.mass /= total;
  return MixedStrategy(inst, {Component{1.0, std::move(vt)}},
                       "engagement_two_types_case" + std::to_string(two_type_case(r)));
}

int n_prime(int N) {
  if (N < 1) throw PreconditionError("N must be at least 1");
  double sum = 0.0;
  for (int i = 1; i <= N; ++i) {
    sum += 1.0 / (N - i + 1);
    if (sum >= 1.0 - 1e-12) return i;
  }
  return N;
}

std::vector<double> well_separated_mix_weights(int N) {
  const int np = n_prime(N);
  std::vector<double> w;
  double sum = 0.0;
  for (int i = 1; i < np; ++i) {
    w.push_back(1.0 / (N - i + 1));
    sum += w.back();
  }
  w.push_back(1.0 - sum);
  return w;
}

TypeSpace make_well_separated_types(int N, double eps) {
  if (N < 1) throw PreconditionError("N must be at least 1");
  if (!(eps > 0.0)) throw PreconditionError("epsilon must be positive");
  std::vector<double> t;
  for (int i = 1; i <= N; ++i) t.push_back((1.0 + eps) * std::pow(1.0 + 1.0 / N, i - 1) - 1.0);
  return TypeSpace(std::move(t));
}

MixedStrategy engagement_eq_well_separated(const ModelInstance& inst) {
  const auto lp = require_linear_costless(inst, "well-separated equilibrium");
  const auto types = inst.types();
  const int N = static_cast<int>(types.size());
  const double sep = 1.0 + 1.0 / N;
  for (int i = 0; i + 1 < N; ++i) {
    if (lp.a[i] < sep * lp.a[i + 1] * (1.0 - 1e-12))
      throw PreconditionError("types " + std::to_string(types[i]) + " and " +
                              std::to_string(types[i + 1]) + " are not well separated");
  }
  const auto weights = well_separated_mix_weights(N);
  const int np = static_cast<int>(weights.size());
  double head = 0.0;  // sum of the non-residual weights
  for (int i = 0; i + 1 < np; ++i) head += weights[i];
  std::vector<Component> comps;
  for (int i = 0; i < np; ++i) {
    const double lo = 1.0 / lp.a[i];
    const double stretch =
        i + 1 < np ? 1.0 / N : static_cast<double>(N - np + 1) / N * (1.0 - head);
    VtPart vt;
    vt.shift = lp.s;
    vt.pieces = {{lo, lo * (1.0 + stretch), 1.0, types[i], types[i], 1.0}};
    comps.push_back(Component{weights[i], std::move(vt)});
  }
  return MixedStrategy(inst, std::move(comps), "engagement_well_separated");
}

MixedStrategy engagement_eq(const ModelInstance& inst, int P) {
  const auto n = inst.type_space().size();
  if (n == 1) return engagement_eq_homogeneous(inst, P);
  if (P != 2) throw PreconditionError("heterogeneous engagement equilibria are characterized for P = 2 only");
  if (n == 2) return engagement_eq_two_types(inst);
  return engagement_eq_well_separated(inst);
}

MixedStrategy investment_eq(const ModelInstance& inst, int P) {
  require_P(P);
  double beta = 0.0;
  if (inst.type_space().size() == 1) {
    beta = beta_t(inst, inst.types()[0]);
  } else {
    for (double t : inst.types())
      if (beta_t(inst, t) > 0.0)
        throw PreconditionError("investment equilibrium with several types needs zero minimum investment");
  }
  return MixedStrategy(inst, {Component{1.0, QualityPart{beta, 1.0 / (P - 1)}}}, "investment");
}

double random_opt_out_probability(double kappa, int P) {
  if (kappa <= 1.0 / P) return 0.0;
  if (kappa >= 1.0) return 1.0;
  const double target = P * std::min(kappa, 1.0);
  auto g = [P](double nu) {
    double s = 0.0, p = 1.0;
    for (int i = 0; i < P; ++i, p *= nu) s += p;
    return s;
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

MixedStrategy random_eq(const ModelInstance& inst, int P) {
  require_P(P);
  if (inst.type_space().size() > 1) {
    for (double t : inst.types())
      if (beta_t(inst, t) > 0.0)
        throw PreconditionError("random equilibrium with several types needs zero minimum investment");
    return MixedStrategy(inst, {Component{1.0, AtomPart{}}}, "random");
  }
  const double beta = beta_t(inst, inst.types()[0]);
  const double kappa = std::min(1.0, quality_cost(beta));
  const double nu = beta > 0.0 ? random_opt_out_probability(kappa, P) : 0.0;
  std::vector<Component> comps;
  if (nu > 0.0) comps.push_back(Component{nu, AtomPart{}});
  if (nu < 1.0) comps.push_back(Component{1.0 - nu, AtomPart{Content{beta, 0.0}}});
  return MixedStrategy(inst, std::move(comps), "random");
}

}  // namespace ccg
