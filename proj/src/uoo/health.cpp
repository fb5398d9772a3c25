#include "overlap/uoo/health.hpp"

#include <algorithm>

namespace overlap::uoo {

GradientHealth::GradientHealth(HealthOptions options) : options_(options) {}

const HealthStep& GradientHealth::record(double norm) {
  HealthStep s;
  s.norm = norm;
  const std::size_t n = steps_.size();
  if (n > 0) {
    const std::size_t from = n > options_.median_window ? n - options_.median_window : 0;
    std::vector<double> window;
    for (std::size_t i = from; i < n; ++i) window.push_back(steps_[i].norm);
    const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
    std::nth_element(window.begin(), mid, window.end());
    s.median = *mid;
    if (window.size() % 2 == 0) {
      s.median = 0.5 * (s.median + *std::max_element(window.begin(), mid));
    }
    s.flagged = norm > options_.spike_factor * s.median;
  }
  std::size_t flags = s.flagged ? 1 : 0;
  const std::size_t span = options_.flag_window - 1;
  for (std::size_t i = n > span ? n - span : 0; i < n; ++i) flags += steps_[i].flagged ? 1 : 0;
  s.flagged_fraction = static_cast<double>(flags) / static_cast<double>(options_.flag_window);
  s.remediate = s.flagged_fraction > options_.remediation_fraction;
  steps_.push_back(s);
  return steps_.back();
}

std::size_t GradientHealth::flag_count() const {
  return static_cast<std::size_t>(std::count_if(steps_.begin(), steps_.end(), [](const HealthStep& s) { return s.flagged; }));
}

bool GradientHealth::remediation_raised() const {
  return std::any_of(steps_.begin(), steps_.end(), [](const HealthStep& s) { return s.remediate; });
}

nlohmann::json GradientHealth::summary() const {
  double worst = 0.0;
  for (const auto& s : steps_) worst = std::max(worst, s.flagged_fraction);
  return {{"steps", steps_.size()},
          {"flags", flag_count()},
          {"max_flagged_fraction", worst},
          {"remediation", remediation_raised()}};
}

GradientHealth gradient_health(std::span<const double> norms, HealthOptions options) {
  GradientHealth h(options);
  for (double v : norms) h.record(v);
  return h;
}

}  // namespace overlap::uoo
