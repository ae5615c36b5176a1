#include "ccg/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ccg {

namespace {

using nlohmann::json;

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing \"") + key + "\"");
  if (!j[key].is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  return j[key].get<double>();
}

std::uint64_t count(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_unsigned()) throw ConfigError(std::string("\"") + key + "\" must be a nonnegative integer");
  return j[key].get<std::uint64_t>();
}

std::string format_value(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

EquilibriumKind parse_equilibrium(const std::string& s) {
  if (s == "auto") return EquilibriumKind::automatic;
  if (s == "homogeneous") return EquilibriumKind::homogeneous;
  if (s == "two_type") return EquilibriumKind::two_type;
  if (s == "well_separated") return EquilibriumKind::well_separated;
  if (s == "investment") return EquilibriumKind::investment;
  if (s == "random") return EquilibriumKind::random;
  throw ConfigError("unknown equilibrium \"" + s + "\"");
}

ModelInstance with_types(const ModelInstance& base, TypeSpace types) {
  return base.family() == Family::linear ? ModelInstance::linear(base.offset(), base.gamma(), std::move(types))
                                         : ModelInstance::kmr(base.scale(), base.gamma(), std::move(types));
}

ModelInstance model_from(const json& j, std::optional<TypeSpace> types_override) {
  if (!j.is_object()) throw ConfigError("model must be an object");
  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("missing \"family\"");
  const std::string family = j["family"];
  const double gamma = number(j, "gamma");
  std::optional<TypeSpace> types = std::move(types_override);
  if (!types) {
    if (!j.contains("types")) throw ConfigError("missing \"types\"");
    if (!j["types"].is_array()) throw ConfigError("\"types\" must be an array");
    std::vector<double> t;
    for (const auto& x : j["types"]) {
      if (!x.is_number()) throw ConfigError("\"types\" entries must be numbers");
      t.push_back(x.get<double>());
    }
    try {
      types.emplace(std::move(t));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (family == "linear") return ModelInstance::linear(number(j, "alpha"), gamma, std::move(*types));
  if (family == "kmr") return ModelInstance::kmr(number(j, "W"), gamma, std::move(*types));
  throw ConfigError("family must be \"linear\" or \"kmr\"");
}

void check_model(const ModelInstance& m) {
  const auto problems = m.validate();
  if (!problems.empty()) throw ConfigError(problems.front());
}

}  // namespace

ModelInstance parse_model_unchecked(const json& j) { return model_from(j, std::nullopt); }

ModelInstance parse_model(const json& j) {
  auto m = parse_model_unchecked(j);
  check_model(m);
  return m;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const json& mj = j.contains("model") ? j["model"] : j;

  std::optional<Sweep> sweep;
  if (j.contains("sweep")) {
    const json& sj = j["sweep"];
    if (!sj.is_object() || !sj.contains("param") || !sj["param"].is_string() || !sj.contains("values") ||
        !sj["values"].is_array() || sj["values"].empty())
      throw ConfigError("sweep needs \"param\" and a nonempty \"values\" array");
    Sweep s;
    s.param = sj["param"];
    if (s.param != "gamma" && s.param != "alpha" && s.param != "N")
      throw ConfigError("sweep param must be gamma, alpha or N");
    for (const auto& v : sj["values"]) {
      if (!v.is_number()) throw ConfigError("sweep values must be numbers");
      s.values.push_back(v.get<double>());
    }
    if (sj.contains("epsilon")) s.epsilon = number(sj, "epsilon");
    if (s.param == "N") {
      for (double v : s.values)
        if (v < 1 || std::floor(v) != v) throw ConfigError("sweep over N needs positive integers");
      if (!(s.epsilon > 0.0)) throw ConfigError("sweep epsilon must be positive");
    }
    sweep = std::move(s);
  }

  // An N sweep supplies its own types, so the model may omit them.
  std::optional<TypeSpace> placeholder;
  if (sweep && sweep->param == "N" && !mj.contains("types")) placeholder.emplace(std::vector<double>{1.0});
  ModelInstance model = model_from(mj, std::move(placeholder));
  check_model(model);

  ExperimentConfig cfg(model);
  cfg.sweep = std::move(sweep);
  cfg.recommender_label = j.value("recommender", std::string("engagement"));
  if (cfg.recommender_label == "all") {
    cfg.recommenders = {Metric::engagement, Metric::investment, Metric::random};
  } else if (auto m = parse_metric(cfg.recommender_label)) {
    cfg.recommenders = {*m};
  } else {
    throw ConfigError("recommender must be engagement, investment, random or all");
  }
  if (j.contains("P")) {
    if (!j["P"].is_number_integer() || j["P"].get<long long>() < 2) throw ConfigError("\"P\" must be an integer >= 2");
    cfg.P = j["P"].get<int>();
  }
  if (j.contains("equilibrium")) {
    if (!j["equilibrium"].is_string()) throw ConfigError("\"equilibrium\" must be a string");
    cfg.equilibrium = parse_equilibrium(j["equilibrium"]);
  }
  cfg.samples = count(j, "samples", cfg.samples);
  cfg.seed = count(j, "seed", cfg.seed);
  if (j.contains("grid")) {
    if (!j["grid"].is_number_integer() || j["grid"].get<long long>() < 2) throw ConfigError("\"grid\" must be an integer >= 2");
    cfg.grid = j["grid"].get<int>();
  }
  if (cfg.equilibrium != EquilibriumKind::automatic && cfg.recommenders.size() > 1)
    throw ConfigError("an explicit equilibrium needs a single recommender");
  cfg.raw = j;
  return cfg;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

std::vector<std::pair<std::string, ModelInstance>> sweep_instances(const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, ModelInstance>> out;
  if (!cfg.sweep) {
    out.emplace_back("", cfg.model);
    return out;
  }
  const auto& m = cfg.model;
  for (double v : cfg.sweep->values) {
    const std::string label = cfg.sweep->param + "=" + format_value(v);
    if (cfg.sweep->param == "gamma") {
      out.emplace_back(label, m.family() == Family::linear ? ModelInstance::linear(m.offset(), v, m.type_space())
                                                           : ModelInstance::kmr(m.scale(), v, m.type_space()));
    } else if (cfg.sweep->param == "alpha") {
      if (m.family() != Family::linear) throw ConfigError("alpha sweep needs the linear family");
      out.emplace_back(label, ModelInstance::linear(v, m.gamma(), m.type_space()));
    } else {
      out.emplace_back(label, with_types(m, make_well_separated_types(static_cast<int>(v), cfg.sweep->epsilon)));
    }
    check_model(out.back().second);
  }
  return out;
}

MixedStrategy build_equilibrium(const ExperimentConfig& cfg, const ModelInstance& inst, Metric m) {
  switch (cfg.equilibrium) {
    case EquilibriumKind::homogeneous:
      return engagement_eq_homogeneous(inst, cfg.P);
    case EquilibriumKind::two_type:
      if (cfg.P != 2) throw PreconditionError("two-type equilibrium needs P = 2");
      return engagement_eq_two_types(inst);
    case EquilibriumKind::well_separated:
      if (cfg.P != 2) throw PreconditionError("well-separated equilibrium needs P = 2");
      return engagement_eq_well_separated(inst);
    case EquilibriumKind::investment:
      return investment_eq(inst, cfg.P);
    case EquilibriumKind::random:
      return random_eq(inst, cfg.P);
    case EquilibriumKind::automatic:
      break;
  }
  switch (m) {
    case Metric::engagement:
      return engagement_eq(inst, cfg.P);
    case Metric::investment:
      return investment_eq(inst, cfg.P);
    case Metric::random:
      return random_eq(inst, cfg.P);
  }
  throw PreconditionError("unknown recommender");
}

}  // namespace ccg
