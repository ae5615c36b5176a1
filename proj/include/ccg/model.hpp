#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccg {

// A piece of content: effort spent on quality and effort spent on gaming tricks.
struct Content {
  double w_costly = 0.0;
  double w_cheap = 0.0;

  friend bool operator==(const Content&, const Content&) = default;
};

// Finite set of user types, drawn uniformly. Throws std::invalid_argument
// unless the list is nonempty, strictly increasing and nonnegative.
class TypeSpace {
 public:
  explicit TypeSpace(std::vector<double> types);

  std::span<const double> types() const { return types_; }
  std::size_t size() const { return types_.size(); }
  double operator[](std::size_t i) const { return types_[i]; }

 private:
  std::vector<double> types_;
};

enum class Family { linear, kmr };

// Either the linear family
//   u = w_costly - w_cheap / t + alpha,  M^E = w_costly + w_cheap,  c = w_costly + gamma * w_cheap
// or the watch-time family
//   u = W t (w_costly - w_cheap / t + 1), M^E = w_costly + w_cheap + 1, same cost.
//
// Construction never throws so that out-of-range instances can still be
// audited; see validate().
class ModelInstance {
 public:
  static ModelInstance linear(double alpha, double gamma, TypeSpace types);
  static ModelInstance kmr(double W, double gamma, TypeSpace types);

  Family family() const { return family_; }
  // alpha for the linear family, 1 for the watch-time family: the offset in f_t.
  double offset() const { return offset_; }
  // 1 for the linear family, W for the watch-time family.
  double scale() const { return scale_; }
  double gamma() const { return gamma_; }
  const TypeSpace& type_space() const { return types_; }
  std::span<const double> types() const { return types_.types(); }

  double cost(const Content& w) const { return w.w_costly + gamma_ * w.w_cheap; }
  double user_utility(const Content& w, double t) const;
  double engagement(const Content& w) const;
  // u(w, t) >= 0 up to rounding, so points computed on a curve stay eligible.
  bool eligible(const Content& w, double t) const;

  // Parameter problems (empty when the instance is within its family's domain).
  std::vector<std::string> validate() const;
  std::string describe() const;

 private:
  ModelInstance(Family f, double offset, double scale, double gamma, TypeSpace types)
      : family_(f), offset_(offset), scale_(scale), gamma_(gamma), types_(std::move(types)) {}

  Family family_;
  double offset_;
  double scale_;
  double gamma_;
  TypeSpace types_;
};

// a_t per type (same order as the type space) and the shift s, such that the
// induced cost is max(0, a_t (m + s) - 1).
struct LinearityParams {
  std::vector<double> a;
  double s = 0.0;

  double induced_cost(std::size_t type_index, double m) const;
};

// Least quality that makes gaming level w_cheap acceptable to type t.
double min_investment(const ModelInstance& inst, double t, double w_cheap);
// Point on the cost-efficient curve of type t at gaming level w_cheap.
Content curve_point(const ModelInstance& inst, double t, double w_cheap);
// Cost of curve_point.
double curve_cost(const ModelInstance& inst, double t, double w_cheap);
// Least w_cheap with curve_cost >= y (0 when curve_cost(0) >= y).
double curve_cost_inverse(const ModelInstance& inst, double t, double y);
// Largest w_cheap whose curve cost equals the cost at w_cheap = 0.
double curve_flat_end(const ModelInstance& inst, double t);
// Engagement of curve_point.
double curve_engagement(const ModelInstance& inst, double t, double w_cheap);

// Cheapest cost of eligible content for type t reaching engagement m.
double induced_cost(const ModelInstance& inst, double t, double m);

std::optional<LinearityParams> linearity_params(const ModelInstance& inst);

double beta_t(const ModelInstance& inst, double t);

// Curve content for type t whose reparameterized engagement M^E + s equals v.
// Throws std::domain_error when v is below the curve minimum or no
// linearity parameters exist.
Content reparam_to_content(const ModelInstance& inst, double v, double t);

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  Content worst_point;
  double worst_type = 0.0;
  double worst_value = 0.0;  // most negative slack found; >= 0 when passing
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  bool all_passed() const;
  std::string to_json() const;
};

// Finite-difference audit of the structural assumptions on a
// points x points grid over [0, extent]^2.
AssumptionReport check_assumptions(const ModelInstance& inst, int points = 50, double extent = 5.0);

}  // namespace ccg
