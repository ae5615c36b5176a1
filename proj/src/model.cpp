#include "ccg/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ccg {

namespace {

constexpr double kBisectTol = 1e-12;
constexpr int kBisectIters = 200;

// Smallest x in [lo, inf) with g(x) >= target, for nondecreasing g.
double bisect_up(const std::function<double(double)>& g, double target, double lo) {
  double hi = std::max(1.0, 2.0 * lo);
  while (g(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw std::domain_error("bisection bracket diverged");
  }
  for (int i = 0; i < kBisectIters && hi - lo > kBisectTol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace

TypeSpace::TypeSpace(std::vector<double> types) : types_(std::move(types)) {
  if (types_.empty()) throw std::invalid_argument("type space is empty");
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (!std::isfinite(types_[i]) || types_[i] < 0.0)
      throw std::invalid_argument("type " + std::to_string(i) + " is negative or not finite");
    if (i > 0 && !(types_[i] > types_[i - 1]))
      throw std::invalid_argument("types must be strictly increasing");
  }
}

ModelInstance ModelInstance::linear(double alpha, double gamma, TypeSpace types) {
  return ModelInstance(Family::linear, alpha, 1.0, gamma, std::move(types));
}

ModelInstance ModelInstance::kmr(double W, double gamma, TypeSpace types) {
  return ModelInstance(Family::kmr, 1.0, W, gamma, std::move(types));
}

double ModelInstance::user_utility(const Content& w, double t) const {
  const double base = w.w_costly - w.w_cheap / t + offset_;
  return family_ == Family::linear ? base : scale_ * t * base;
}

bool ModelInstance::eligible(const Content& w, double t) const {
  const double magnitude = w.w_costly + w.w_cheap / t + std::abs(offset_);
  const double tol = 1e-12 * std::max(1.0, magnitude) * (family_ == Family::linear ? 1.0 : scale_ * t);
  return user_utility(w, t) >= -tol;
}

double ModelInstance::engagement(const Content& w) const {
  const double m = w.w_costly + w.w_cheap;
  return family_ == Family::linear ? m : m + 1.0;
}

std::vector<std::string> ModelInstance::validate() const {
  std::vector<std::string> problems;
  if (!(gamma_ >= 0.0 && gamma_ < 1.0)) problems.push_back("gamma must lie in [0, 1)");
  if (family_ == Family::linear && !(offset_ > -1.0)) problems.push_back("alpha must exceed -1");
  if (family_ == Family::kmr && !(scale_ > 0.0)) problems.push_back("W must be positive");
  if (!std::isfinite(offset_) || !std::isfinite(scale_) || !std::isfinite(gamma_))
    problems.push_back("parameters must be finite");
  if (types_[0] <= 0.0) problems.push_back("types must be positive");
  return problems;
}

std::string ModelInstance::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (family_ == Family::linear)
    os << "family=linear;alpha=" << offset_;
  else
    os << "family=kmr;W=" << scale_;
  os << ";gamma=" << gamma_ << ";types=";
  for (std::size_t i = 0; i < types_.size(); ++i) os << (i ? " " : "") << types_[i];
  return os.str();
}

double LinearityParams::induced_cost(std::size_t type_index, double m) const {
  return std::max(0.0, a.at(type_index) * (m + s) - 1.0);
}

double min_investment(const ModelInstance& inst, double t, double w_cheap) {
  return std::max(0.0, w_cheap / t - inst.offset());
}

Content curve_point(const ModelInstance& inst, double t, double w_cheap) {
  return {min_investment(inst, t, w_cheap), w_cheap};
}

double curve_cost(const ModelInstance& inst, double t, double w_cheap) {
  return inst.cost(curve_point(inst, t, w_cheap));
}

double curve_cost_inverse(const ModelInstance& inst, double t, double y) {
  // C_t(x) = gamma x + max(0, x/t - b): linear up to the kink x = max(0, t b), steeper after.
  const double b = inst.offset();
  const double g = inst.gamma();
  const double kink = std::max(0.0, t * b);
  if (y <= curve_cost(inst, t, 0.0)) return 0.0;
  const double at_kink = curve_cost(inst, t, kink);
  if (y <= at_kink) return y / g;  // only reachable when g > 0
  return (y + b) / (g + 1.0 / t);
}

double curve_flat_end(const ModelInstance& inst, double t) {
  return inst.gamma() > 0.0 ? 0.0 : std::max(0.0, t * inst.offset());
}

double curve_engagement(const ModelInstance& inst, double t, double w_cheap) {
  return inst.engagement(curve_point(inst, t, w_cheap));
}

double induced_cost(const ModelInstance& inst, double t, double m) {
  if (m <= curve_engagement(inst, t, 0.0)) return curve_cost(inst, t, 0.0);
  const double x = bisect_up([&](double x) { return curve_engagement(inst, t, x); }, m, 0.0);
  return curve_cost(inst, t, x);
}

std::optional<LinearityParams> linearity_params(const ModelInstance& inst) {
  if (inst.gamma() != 0.0) return std::nullopt;
  double s = 0.0;
  if (inst.family() == Family::linear) {
    if (inst.offset() != 1.0) return std::nullopt;
    s = 1.0;
  }
  LinearityParams p;
  p.s = s;
  for (double t : inst.types()) p.a.push_back(1.0 / (1.0 + t));
  return p;
}

double beta_t(const ModelInstance& inst, double t) { return min_investment(inst, t, 0.0); }

Content reparam_to_content(const ModelInstance& inst, double v, double t) {
  const auto lp = linearity_params(inst);
  if (!lp) throw std::domain_error("reparameterization needs linear induced costs");
  const double target = v - lp->s;
  const double lowest = curve_engagement(inst, t, 0.0);
  if (target < lowest - kBisectTol)
    throw std::domain_error("engagement " + std::to_string(v) + " below the curve minimum");
  if (target <= lowest) return curve_point(inst, t, 0.0);
  const double x = bisect_up([&](double x) { return curve_engagement(inst, t, x); }, target, 0.0);
  return curve_point(inst, t, x);
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string AssumptionReport::to_json() const {
  nlohmann::json j;
  j["all_passed"] = all_passed();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"passed", c.passed},
                           {"worst_value", c.worst_value},
                           {"worst_type", c.worst_type},
                           {"worst_point", {c.worst_point.w_costly, c.worst_point.w_cheap}}});
  }
  return j.dump(2);
}

AssumptionReport check_assumptions(const ModelInstance& inst, int points, double extent) {
  // Each check tracks its smallest slack; a check passes when every slack is
  // above the margin (strict conditions) or nonnegative (weak ones).
  struct Tracker {
    AssumptionCheck check;
    double margin;
    bool strict;
    void see(double slack, const Content& w, double t) {
      if (slack < check.worst_value) {
        check.worst_value = slack;
        check.worst_point = w;
        check.worst_type = t;
      }
    }
    AssumptionCheck finish() {
      check.passed = strict ? check.worst_value > margin : check.worst_value >= -margin;
      return check;
    }
  };
  const double inf = std::numeric_limits<double>::infinity();
  auto make = [&](const char* name, double margin, bool strict) {
    Tracker tr{AssumptionCheck{name, true, {}, 0.0, inf}, margin, strict};
    return tr;
  };
  Tracker cost_ok = make("cost_nonnegative", 0.0, false);
  Tracker u_costly = make("utility_increasing_in_quality", 1e-7, true);
  Tracker u_cheap = make("utility_decreasing_in_gaming", 1e-7, true);
  Tracker engage = make("engagement_nonnegative_increasing", 1e-9, false);
  Tracker type_mono = make("type_monotonicity", 1e-9, false);
  Tracker cost_eff = make("cost_effectiveness", 1e-7, true);

  const auto types = inst.types();
  const Content origin{};
  cost_ok.see(inst.cost(origin) == 0.0 ? 0.0 : -std::abs(inst.cost(origin)), origin, 0.0);

  const int n = std::max(points, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Content w{extent * i / (n - 1), extent * j / (n - 1)};
      const double hq = 1e-6 * std::max(1.0, w.w_costly);
      const double hg = 1e-6 * std::max(1.0, w.w_cheap);
      const Content qp{w.w_costly + hq, w.w_cheap}, qm{w.w_costly - hq, w.w_cheap};
      const Content gp{w.w_costly, w.w_cheap + hg}, gm{w.w_costly, w.w_cheap - hg};

      cost_ok.see(inst.cost(w), w, 0.0);

      const double dme_q = (inst.engagement(qp) - inst.engagement(qm)) / (2 * hq);
      const double dme_g = (inst.engagement(gp) - inst.engagement(gm)) / (2 * hg);
      engage.see(std::min({inst.engagement(w), dme_q, dme_g}), w, 0.0);

      const double dc_q = (inst.cost(qp) - inst.cost(qm)) / (2 * hq);
      const double dc_g = (inst.cost(gp) - inst.cost(gm)) / (2 * hg);
      if (dc_q > 0.0 && dme_q > 0.0)
        cost_eff.see(dme_g / dme_q - dc_g / dc_q, w, 0.0);
      else
        cost_eff.see(-inf, w, 0.0);

      for (std::size_t k = 0; k < types.size(); ++k) {
        const double t = types[k];
        u_costly.see((inst.user_utility(qp, t) - inst.user_utility(qm, t)) / (2 * hq), w, t);
        u_cheap.see(-(inst.user_utility(gp, t) - inst.user_utility(gm, t)) / (2 * hg), w, t);
        if (k + 1 < types.size() && inst.user_utility(w, t) >= 0.0)
          type_mono.see(inst.user_utility(w, types[k + 1]), w, types[k + 1]);
      }
    }
  }

  AssumptionReport report;
  for (Tracker* tr : {&cost_ok, &u_costly, &u_cheap, &engage, &type_mono, &cost_eff}) {
    if (tr->check.worst_value == inf) tr->check.worst_value = 0.0;
    report.checks.push_back(tr->finish());
  }
  return report;
}

}  // namespace ccg
