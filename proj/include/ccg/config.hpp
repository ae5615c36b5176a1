#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ccg/equilibrium.hpp"
#include "ccg/game.hpp"
#include "ccg/model.hpp"

namespace ccg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class EquilibriumKind { automatic, homogeneous, two_type, well_separated, investment, random };

struct Sweep {
  std::string param;  // gamma, alpha or N
  std::vector<double> values;
  double epsilon = 0.01;  // type spacing for N sweeps
};

struct ExperimentConfig {
  explicit ExperimentConfig(ModelInstance m) : model(std::move(m)) {}

  ModelInstance model;
  std::vector<Metric> recommenders;
  std::string recommender_label;  // as written: a metric name or "all"
  int P = 2;
  EquilibriumKind equilibrium = EquilibriumKind::automatic;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
  int grid = 200;
  std::optional<Sweep> sweep;
  nlohmann::json raw;  // normalized echo for output headers
};

// Model object {"family", "alpha" | "W", "gamma", "types"}. The checked
// variant also rejects parameters outside the family's domain.
ModelInstance parse_model_unchecked(const nlohmann::json& j);
ModelInstance parse_model(const nlohmann::json& j);

// Either a full experiment object with a "model" member or a bare model object.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);
ExperimentConfig load_config(const std::string& path);

// Sweep points as (label, instance); a single unlabeled point without a sweep.
std::vector<std::pair<std::string, ModelInstance>> sweep_instances(const ExperimentConfig& cfg);

// Equilibrium played under recommender m. Throws PreconditionError when the
// requested construction does not apply to the instance.
MixedStrategy build_equilibrium(const ExperimentConfig& cfg, const ModelInstance& inst, Metric m);

}  // namespace ccg
