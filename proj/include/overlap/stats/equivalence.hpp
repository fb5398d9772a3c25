#pragma once

#include <optional>
#include <span>

#include <json.hpp>

namespace overlap::stats {

struct TostResult {
  double delta = 0.2;       // margin in Cohen's d units
  double alpha = 0.05;
  double effect = 0.0;      // Cohen's d, pooled SD
  double ci_low = 0.0;      // (1 - 2 alpha) interval for d
  double ci_high = 0.0;
  double p_lower = 1.0;     // H0: d <= -delta
  double p_upper = 1.0;     // H0: d >= delta
  bool equivalent = false;
  std::size_t n_a = 0, n_b = 0;
  std::size_t n_required = 0;  // per group, literal sample-size formula
};

/// Two one-sided tests on the standardized mean difference. The interval is
/// d +/- t(1 - alpha, n_a + n_b - 2) * sqrt(1/n_a + 1/n_b); equivalence iff it
/// lies strictly inside (-delta, delta).
TostResult tost(std::span<const double> a, std::span<const double> b, double delta = 0.2, double alpha = 0.05);

struct SampleSize {
  std::size_t per_group = 0;          // ceil(2 (z_{1-a} + z_{power})^2 / delta^2), at least 1
  double exact = 0.0;                 // before the ceiling
  std::optional<std::size_t> stated;  // value printed in the source for the default inputs
  bool discrepancy = false;
};

SampleSize tost_sample_size(double delta = 0.2, double power = 0.8, double alpha = 0.05);

double cohens_d(std::span<const double> a, std::span<const double> b);
double pearson(std::span<const double> a, std::span<const double> b);
/// p_b / (p_b + p_c + p_d).
double etr(double p_b, double p_c, double p_d);

nlohmann::json to_json(const TostResult& r);
nlohmann::json to_json(const SampleSize& s);

}  // namespace overlap::stats
