#pragma once

#include <span>
#include <vector>

#include <json.hpp>

namespace overlap::uoo {

struct HealthOptions {
  double spike_factor = 10.0;        // flag when norm > factor * running median
  std::size_t median_window = 100;   // trailing steps feeding the median
  std::size_t flag_window = 100;     // trailing steps for the flagged fraction
  double remediation_fraction = 0.05;
};

struct HealthStep {
  double norm = 0.0;
  double median = 0.0;  // median of the preceding window, 0 at the first step
  bool flagged = false;
  double flagged_fraction = 0.0;  // flags in the trailing window / flag_window
  bool remediate = false;
};

/// Per-step monitor of the topology-loss gradient norm. The median is taken
/// over the steps before the current one, so a spike cannot mask itself.
class GradientHealth {
 public:
  explicit GradientHealth(HealthOptions options = {});

  const HealthStep& record(double norm);
  const std::vector<HealthStep>& steps() const { return steps_; }
  std::size_t flag_count() const;
  bool remediation_raised() const;
  nlohmann::json summary() const;

 private:
  HealthOptions options_;
  std::vector<HealthStep> steps_;
};

GradientHealth gradient_health(std::span<const double> norms, HealthOptions options = {});

}  // namespace overlap::uoo
