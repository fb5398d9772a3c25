#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

namespace overlap::stats {

struct ThresholdReport {
  double dip_statistic = 0.0;
  double dip_p = 1.0;
  std::optional<double> mode_gap_midpoint;  // only when the dip rejects unimodality
  std::vector<double> kde_inflections;
  std::optional<double> kde_candidate;      // inflection nearest the other estimates
  double gmm_bic_1 = 0.0;
  double gmm_bic_2 = 0.0;
  std::optional<double> gmm_crossover;
  bool agreement = false;                   // all three within the tolerance
  std::optional<double> kappa_low;          // declared only on agreement
  std::vector<std::size_t> changepoints;    // indices into the NS-ordered tension series
  std::optional<double> tension_drop;       // largest relative drop in mean tension at a changepoint
  std::optional<double> kappa_high;         // NS there, only when the drop exceeds min_drop
};

struct ThresholdOptions {
  double alpha = 0.05;
  double tolerance = 0.05;
  std::size_t dip_draws = 10000;
  std::size_t smoothing = 5;   // running median window on the tension series
  double min_drop = 0.5;       // upper threshold needs a larger relative tension drop
};

/// Lower threshold from the NS sample (dip + KDE + two-component GMM) and,
/// when `tension` is given (paired with `ns`), the upper threshold from PELT
/// on tension ordered by NS.
ThresholdReport detect_thresholds(std::span<const double> ns, std::span<const double> tension, std::uint64_t seed,
                                  const ThresholdOptions& options = {});

/// Upper threshold only: PELT on `tension` ordered by the paired `ns` values.
/// Fills changepoints, tension_drop and kappa_high of `report`.
void detect_upper_threshold(std::span<const double> ns, std::span<const double> tension,
                            const ThresholdOptions& options, ThresholdReport& report);

/// Odd-window running median; windows shrink at the ends.
std::vector<double> running_median(std::span<const double> x, std::size_t window);

nlohmann::json to_json(const ThresholdReport& r);

}  // namespace overlap::stats
