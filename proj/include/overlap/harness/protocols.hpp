#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "overlap/harness/train.hpp"
#include "overlap/ph/point_cloud.hpp"
#include "overlap/stats/equivalence.hpp"
#include "overlap/stats/threshold.hpp"

namespace overlap::harness {

// ---- three-condition comparison ----

struct PairedTest {
  std::size_t pairs = 0;
  double mean_difference = 0.0;
  double sd_difference = 0.0;
  double t = 0.0;
  double p_value = 1.0;  // one-sided, H1: first > second
};

/// One-sided paired t-test. With fewer than two pairs p = 1. A zero spread
/// gives p = 0 for a positive mean difference and p = 1 otherwise.
PairedTest paired_one_sided(std::span<const double> first, std::span<const double> second);

struct ConditionSummary {
  Condition condition = Condition::uoo;
  std::size_t parameter_count = 0;
  std::vector<double> test_accuracy, transfer_accuracy, tension, ns;
  nlohmann::json to_json() const;
};

struct PocReport {
  std::vector<RunResult> runs;                 // condition-major, then seed
  std::vector<ConditionSummary> conditions;    // uoo, ode_ablation, contrastive
  double capacity_spread = 0.0;                // max |count - budget| / budget
  std::optional<std::string> gate;             // PROCEED / TERMINATE; empty when a run aborted
  PairedTest transfer_test;                    // uoo vs contrastive on transfer accuracy
  PairedTest tension_test;                     // same on tau, reported only
  bool underpowered = false;                   // fewer than 3 seeds
  bool ordering_holds = false;                 // uoo > ode_ablation > contrastive on mean transfer
  std::vector<std::string> aborted;
  nlohmann::json to_json() const;
};

struct PocOptions {
  std::filesystem::path out_dir;  // empty: no run directories
  std::size_t jobs = 1;
  // Placebo: run uoo in place of contrastive so the gate compares uoo with itself.
  bool placebo = false;
};

/// Checks capacity (every condition within 5% of the budget, else
/// CapacityError), trains every (condition, seed), evaluates transfer on the
/// novel family, and applies the gate.
PocReport run_poc(const ExperimentConfig& cfg, const PocOptions& options = {});

/// Parameter counts the three conditions would have under `cfg`.
std::vector<std::pair<Condition, std::size_t>> capacity(const ExperimentConfig& cfg);

// ---- alpha sweep ----

struct Histogram {
  double low = 0.0, width = 0.0;
  std::vector<double> density;  // integrates to 1
};
Histogram density_histogram(std::span<const double> values, std::size_t bins = 20);

struct SweepEntry {
  double alpha = 0.0;
  std::size_t runs = 0, aborted = 0;
  std::vector<double> ns;        // per-sample NS on the test split, all seeds
  double ns_mean = 0.0, ns_sd = 0.0;
  double tension = 0.0;          // mean over seeds
  double accuracy = 0.0;         // mean over seeds
  Histogram histogram;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  stats::ThresholdReport thresholds;
  std::string label;             // phase_transition or tuning_parameter
  std::optional<double> c_proxy; // the upper-threshold changepoint, by another name
  std::vector<std::pair<double, double>> ns_tension;  // pooled (batch NS, tau) the changepoint ran on
  bool meets_design = false;     // >= 5 alphas spanning >= 2 decades
  std::size_t smoothing = 5;
  nlohmann::json to_json() const;
};

struct SweepOptions {
  std::filesystem::path out_dir;
  std::size_t jobs = 1;
  std::size_t dip_draws = 2000;
};

/// Trains the uoo condition at every alpha (constant schedule) and seed.
/// Raises SweepInsufficientError when fewer than 3 alphas have a finished run.
SweepReport alpha_sweep(const ExperimentConfig& cfg, const std::vector<double>& alphas,
                        const SweepOptions& options = {});

// ---- stress protocols ----

enum class StressMode { alpha_decay, ood, over_entangle };
std::string to_string(StressMode m);
StressMode stress_mode_from_string(const std::string& s);

struct StressOptions {
  int decay_epochs = 50;
  int over_epochs = 10;
  double lambda_factor = 10.0;
  std::vector<double> shifts{0, 1, 2, 5};
};

struct StressReport {
  StressMode mode = StressMode::alpha_decay;
  std::vector<double> checkpoints;  // epoch index or shift
  std::vector<double> ns, beta1, tension, accuracy;
  double baseline_ns = 0.0, baseline_beta1 = 0.0, baseline_accuracy = 0.0;
  bool collapse = false;            // final beta1 below half its start
  bool ns_reduced = false;          // final NS below the trained value
  std::optional<double> ns_accuracy_correlation;
  std::optional<double> beta1_accuracy_correlation;
  nlohmann::json to_json() const;
};

/// Works on a copy of the trained network; `trained` is left as is.
StressReport stress_test(const RunResult& trained, const RunData& data, StressMode mode,
                         const StressOptions& options = {});

// ---- falsification and trajectory clouds ----

struct Falsification {
  stats::TostResult tost;
  bool falsified = false;    // equivalence declared
  bool underpowered = false; // smaller group below the per-group sample size
  nlohmann::json to_json() const;
};

Falsification tost_falsification(std::span<const double> tension_a, std::span<const double> tension_b);

struct TrajectoryCloud {
  ph::PointCloud cloud;
  double explained_variance = 0.0;  // fraction kept by the projection
  std::size_t components = 0;
};

/// Stacks every state of every grid time ([B x D] tensors) and projects onto
/// the top principal components (at most 8).
TrajectoryCloud trajectory_to_cloud(const std::vector<ad::Tensor>& trajectory, std::size_t components = 8);

}  // namespace overlap::harness
