#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "overlap/harness/config.hpp"
#include "overlap/harness/network.hpp"
#include "overlap/synth/dataset.hpp"
#include "overlap/uoo/health.hpp"
#include "overlap/uoo/metrics.hpp"

namespace overlap::harness {

struct MetricsRow {
  int epoch = 0;
  std::size_t step = 0;
  double task_loss = 0.0;
  double topo_loss = 0.0;    // computed on the batch even when alpha = 0
  double total_loss = 0.0;
  double alpha = 0.0;
  double tension = 0.0;      // tau of the batch representation cloud
  double ns = 0.0;           // mean NS over the batch
  double beta1 = 0.0;        // total finite H1 persistence of the batch
  double topo_grad_norm = 0.0;
  double grad_norm = 0.0;    // all parameters, total loss
  std::string flags;         // '|'-joined: spike, remediate, alpha_step
};

/// Append-only record of logged steps.
class MetricsLog {
 public:
  void append(MetricsRow row);
  const std::vector<MetricsRow>& rows() const { return rows_; }
  std::string to_csv() const;
  nlohmann::json to_json() const;

 private:
  std::vector<MetricsRow> rows_;
};

struct RunData {
  synth::Dataset train, test;
  std::optional<synth::Dataset> transfer;  // novel family, same latent semantics
};

/// Dataset of `family` (n rows, 70/30 split by seed). With `with_transfer`,
/// training uses the first family of transfer_pair(seed) instead and the
/// novel one is generated with transfer_n rows.
RunData make_run_data(const ExperimentConfig& cfg, std::uint64_t seed, bool with_transfer);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;
  double ns = 0.0;                 // mean per-sample NS
  std::vector<double> ns_values;   // per sample
  double tension = 0.0;            // tau on the first batch_size rows
  double beta1 = 0.0;
  std::vector<double> representations;  // first batch_size rows, row-major
  std::size_t representation_dim = 0;
  std::vector<std::pair<double, double>> batch_ns_tension;  // (mean NS, tau) per full eval batch
};

/// NS of representations goes through a fixed projection drawn from the seed.
uoo::NsProjection ns_projection(const ExperimentConfig& cfg, std::size_t representation_dim, std::uint64_t seed);

Evaluation evaluate(const Network& net, const synth::Dataset& ds, const ExperimentConfig& cfg, std::uint64_t seed);

struct TrainOptions {
  std::optional<uoo::AlphaSchedule> schedule;  // overrides cfg.alpha
  std::optional<double> lambda;                // overrides cfg.lambda
  std::optional<int> epochs;                   // overrides cfg.epochs
  std::size_t first_step = 0;
  std::filesystem::path run_dir;               // empty: nothing written
  // Called after every epoch with the epoch index.
  std::function<void(int)> on_epoch;
};

struct RunResult {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::shared_ptr<Network> network;
  MetricsLog log;
  nlohmann::json health;
  std::size_t parameter_count = 0;
  int epochs_run = 0;
  bool early_stopped = false;
  bool aborted = false;
  std::string abort_reason;
  std::size_t steps = 0;
  Evaluation test;
  std::optional<Evaluation> transfer;
  nlohmann::json to_json() const;
};

/// Trains `net` in place on data.train. Divergence (non-finite or > 1e6 loss)
/// ends the run with aborted = true instead of throwing.
RunResult train_network(std::shared_ptr<Network> net, const ExperimentConfig& cfg, std::uint64_t seed,
                        const RunData& data, const TrainOptions& options = {});

/// Builds the condition's network and trains it; with `run_dir`, writes
/// config.json, metrics.csv, diagrams/*.csv and clouds/*.csv (per logged
/// step), representations.csv (test), model.* and report.json there.
RunResult run_condition(const ExperimentConfig& cfg, std::uint64_t seed, const RunData& data,
                        const std::filesystem::path& run_dir = {});

}  // namespace overlap::harness
