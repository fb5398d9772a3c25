#include "overlap/stats/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "overlap/error.hpp"
#include "overlap/stats/changepoint.hpp"
#include "overlap/stats/density.hpp"
#include "overlap/stats/dip.hpp"

namespace overlap::stats {

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

// Midpoint between the two tallest KDE peaks.
std::optional<double> mode_gap(std::span<const double> ns) {
  const auto grid = kde(ns);
  const auto modes = kde_modes(ns);
  if (modes.size() < 2) return std::nullopt;
  auto height = [&](double at) {
    const auto it = std::lower_bound(grid.grid.begin(), grid.grid.end(), at);
    const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - grid.grid.begin(), grid.grid.size() - 1));
    return grid.density[i];
  };
  std::vector<double> sorted(modes);
  std::sort(sorted.begin(), sorted.end(), [&](double a, double b) { return height(a) > height(b); });
  return 0.5 * (sorted[0] + sorted[1]);
}

}  // namespace

std::vector<double> running_median(std::span<const double> x, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw ParameterError("running median window must be odd");
  const std::size_t half = window / 2;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(x.size(), i + half + 1);
    out[i] = quantile(std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(lo), x.begin() + static_cast<std::ptrdiff_t>(hi)), 0.5);
  }
  return out;
}

void detect_upper_threshold(std::span<const double> ns, std::span<const double> tension, const ThresholdOptions& o,
                            ThresholdReport& r) {
  if (tension.size() != ns.size()) throw DimensionError("tension must pair with NS");
  if (ns.size() < 4) throw ParameterError("upper threshold needs at least 4 (NS, tension) pairs");
  r.changepoints.clear();
  r.tension_drop.reset();
  r.kappa_high.reset();
  std::vector<std::size_t> order(ns.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ns[a] < ns[b]; });
  std::vector<double> sorted_ns(ns.size()), sorted_tension(ns.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_ns[i] = ns[order[i]];
    sorted_tension[i] = tension[order[i]];
  }
  const auto smooth = running_median(sorted_tension, o.smoothing);
  r.changepoints = pelt(smooth);
  // Segment means either side of each changepoint; keep the largest relative drop.
  std::vector<std::size_t> bounds{0};
  bounds.insert(bounds.end(), r.changepoints.begin(), r.changepoints.end());
  bounds.push_back(smooth.size());
  auto seg_mean = [&](std::size_t k) {
    return std::accumulate(smooth.begin() + static_cast<std::ptrdiff_t>(bounds[k]),
                           smooth.begin() + static_cast<std::ptrdiff_t>(bounds[k + 1]), 0.0) /
           static_cast<double>(bounds[k + 1] - bounds[k]);
  };
  std::optional<double> at;
  for (std::size_t k = 0; k + 2 < bounds.size(); ++k) {
    const double before = seg_mean(k), after = seg_mean(k + 1);
    const double drop = before != 0.0 ? (before - after) / std::abs(before) : 0.0;
    if (!r.tension_drop || drop > *r.tension_drop) {
      r.tension_drop = drop;
      const std::size_t cp = bounds[k + 1];
      at = 0.5 * (sorted_ns[cp - 1] + sorted_ns[cp]);
    }
  }
  if (r.tension_drop && *r.tension_drop > o.min_drop) r.kappa_high = at;
}

ThresholdReport detect_thresholds(std::span<const double> ns, std::span<const double> tension, std::uint64_t seed,
                                  const ThresholdOptions& o) {
  if (ns.size() < 20) throw ParameterError("threshold detection needs at least 20 NS values");
  if (!tension.empty() && tension.size() != ns.size()) throw DimensionError("tension must pair with NS");
  ThresholdReport r;

  const auto dip = dip_test(ns, seed, o.dip_draws);
  r.dip_statistic = dip.statistic;
  r.dip_p = dip.p_value;
  if (r.dip_p < o.alpha) r.mode_gap_midpoint = mode_gap(ns);

  r.kde_inflections = kde_inflections(ns);
  const auto gmm = gmm2_bic(ns, seed ^ 0x9e3779b97f4a7c15ULL);
  r.gmm_bic_1 = gmm.bic1;
  r.gmm_bic_2 = gmm.bic2;
  r.gmm_crossover = gmm.crossover;

  std::optional<double> anchor = r.gmm_crossover ? r.gmm_crossover : r.mode_gap_midpoint;
  if (anchor && !r.kde_inflections.empty()) {
    r.kde_candidate = *std::min_element(r.kde_inflections.begin(), r.kde_inflections.end(),
                                        [&](double a, double b) { return std::abs(a - *anchor) < std::abs(b - *anchor); });
  }
  if (r.mode_gap_midpoint && r.kde_candidate && r.gmm_crossover) {
    const double a = *r.mode_gap_midpoint, b = *r.kde_candidate, c = *r.gmm_crossover;
    r.agreement = std::abs(a - b) <= o.tolerance && std::abs(a - c) <= o.tolerance && std::abs(b - c) <= o.tolerance;
    if (r.agreement) r.kappa_low = (a + b + c) / 3.0;
  }

  if (!tension.empty()) detect_upper_threshold(ns, tension, o, r);
  return r;
}

nlohmann::json to_json(const ThresholdReport& r) {
  return {{"dip_statistic", r.dip_statistic},
          {"dip_p", r.dip_p},
          {"mode_gap_midpoint", opt(r.mode_gap_midpoint)},
          {"kde_inflections", r.kde_inflections},
          {"kde_candidate", opt(r.kde_candidate)},
          {"gmm_bic_1", r.gmm_bic_1},
          {"gmm_bic_2", r.gmm_bic_2},
          {"gmm_crossover", opt(r.gmm_crossover)},
          {"agreement", r.agreement},
          {"kappa_low", opt(r.kappa_low)},
          {"changepoints", r.changepoints},
          {"kappa_high", opt(r.kappa_high)},
          {"tension_drop", opt(r.tension_drop)}};
}

}  // namespace overlap::stats
