#include "overlap/harness/config.hpp"

#include <cstdio>
#include <set>

#include "overlap/error.hpp"
#include "overlap/hash.hpp"
#include "overlap/synth/dataset.hpp"

namespace overlap::harness {

std::string to_string(Condition c) {
  switch (c) {
    case Condition::uoo: return "uoo";
    case Condition::ode_ablation: return "ode_ablation";
    case Condition::contrastive: return "contrastive";
  }
  return "?";
}

Condition condition_from_string(const std::string& s) {
  if (s == "uoo") return Condition::uoo;
  if (s == "ode_ablation") return Condition::ode_ablation;
  if (s == "contrastive") return Condition::contrastive;
  throw ParameterError("unknown condition '" + s + "'");
}

nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"condition", to_string(c.condition)},
          {"model", uoo::to_json(c.model)},
          {"alpha", c.alpha.to_json()},
          {"lambda", c.lambda},
          {"eps_min", c.eps_min},
          {"max_dim", c.max_dim},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"seeds", c.seeds},
          {"log_every", c.log_every},
          {"param_budget", c.param_budget},
          {"family", c.family},
          {"n", c.n},
          {"entanglement", c.entanglement},
          {"transfer_n", c.transfer_n},
          {"learning_rate", c.learning_rate},
          {"patience", c.patience},
          {"ode", uoo::to_string(c.ode)},
          {"grid_points", c.grid_points},
          {"contrastive_weight", c.contrastive_weight},
          {"temperature", c.temperature}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  static const std::set<std::string> keys{"condition", "model", "alpha", "lambda", "eps_min", "max_dim", "epochs",
                                          "batch_size", "seeds", "log_every", "param_budget", "family", "n",
                                          "entanglement", "transfer_n", "learning_rate", "patience", "ode",
                                          "grid_points", "contrastive_weight", "temperature"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) throw ParameterError("unknown config key '" + k + "'");
  ExperimentConfig c;
  try {
    if (j.contains("condition")) c.condition = condition_from_string(j["condition"].get<std::string>());
    if (j.contains("model")) c.model = uoo::model_config_from_json(j["model"]);
    if (j.contains("alpha")) c.alpha = uoo::AlphaSchedule::from_json(j["alpha"]);
    auto get = [&](const char* k, auto& field) {
      if (j.contains(k)) field = j[k].get<std::decay_t<decltype(field)>>();
    };
    get("lambda", c.lambda);
    get("eps_min", c.eps_min);
    get("max_dim", c.max_dim);
    get("epochs", c.epochs);
    get("batch_size", c.batch_size);
    get("seeds", c.seeds);
    get("log_every", c.log_every);
    get("param_budget", c.param_budget);
    get("family", c.family);
    get("n", c.n);
    get("entanglement", c.entanglement);
    get("transfer_n", c.transfer_n);
    get("learning_rate", c.learning_rate);
    get("patience", c.patience);
    if (j.contains("ode")) c.ode = uoo::ode_method_from_string(j["ode"].get<std::string>());
    get("grid_points", c.grid_points);
    get("contrastive_weight", c.contrastive_weight);
    get("temperature", c.temperature);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("bad config value: ") + e.what());
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  if (c.lambda < 0.0) throw ParameterError("lambda must be non-negative");
  if (!(c.eps_min >= 0.0)) throw ParameterError("eps_min must be non-negative");
  if (c.max_dim < 1 || c.max_dim > 2) throw ParameterError("max_dim must be 1 or 2");
  if (c.epochs < 1) throw ParameterError("epochs must be positive");
  if (c.batch_size < 4) throw ParameterError("batch_size must be at least 4");
  if (c.seeds.empty()) throw ParameterError("at least one seed is needed");
  if (c.log_every < 1) throw ParameterError("log_every must be positive");
  if (!synth::known_family(c.family)) throw ParameterError("unknown family '" + c.family + "'");
  if (c.n < 20) throw ParameterError("n must be at least 20");
  if (!(c.entanglement >= 0.0 && c.entanglement <= 1.0)) throw ParameterError("entanglement must lie in [0, 1]");
  if (!(c.learning_rate > 0.0)) throw ParameterError("learning_rate must be positive");
  if (c.patience < 1) throw ParameterError("patience must be positive");
  if (c.grid_points < 2) throw ParameterError("grid_points must be at least 2");
  if (!(c.temperature > 0.0)) throw ParameterError("temperature must be positive");
  if (c.contrastive_weight < 0.0) throw ParameterError("contrastive_weight must be non-negative");
  if (c.model.d1 != synth::kFeatureDim || c.model.d2 != synth::kFeatureDim)
    throw ParameterError("model d1 and d2 must match the 64-dim synthetic modalities");
}

std::string canonical_dump(const nlohmann::json& j) { return j.dump(); }

std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(canonical_dump(to_json(c)))));
  return buf;
}

}  // namespace overlap::harness
