#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "overlap/uoo/model.hpp"
#include "overlap/uoo/ode.hpp"
#include "overlap/uoo/schedule.hpp"

namespace overlap::harness {

enum class Condition { uoo, ode_ablation, contrastive };
std::string to_string(Condition c);
Condition condition_from_string(const std::string& s);

struct ExperimentConfig {
  Condition condition = Condition::uoo;
  uoo::ModelConfig model;
  uoo::AlphaSchedule alpha{0.1, uoo::DecayMode::constant};
  double lambda = 1.0;
  double eps_min = 1e-4;
  int max_dim = 1;
  int epochs = 50;
  std::size_t batch_size = 64;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::size_t log_every = 50;
  std::size_t param_budget = 500000;

  // data
  std::string family = "xor64";
  std::size_t n = 2000;
  double entanglement = 0.0;
  std::size_t transfer_n = 1000;

  // optimisation
  double learning_rate = 1e-3;
  int patience = 200;  // epochs without held-out improvement before stopping
  uoo::OdeMethod ode = uoo::OdeMethod::rk4;
  std::size_t grid_points = 20;
  double contrastive_weight = 0.1;
  double temperature = 0.1;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Missing keys keep their defaults; unknown keys raise ParameterError.
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Range checks; raises ParameterError.
void validate(const ExperimentConfig& c);

/// Sorted keys, compact, shortest round-trip floats.
std::string canonical_dump(const nlohmann::json& j);
/// FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

}  // namespace overlap::harness
