#include "overlap/stats/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "overlap/error.hpp"
#include "overlap/stats/density.hpp"

namespace overlap::stats {

SegmentCost::SegmentCost(std::span<const double> x) : sum_(x.size() + 1, 0.0), sum_sq_(x.size() + 1, 0.0) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum_[i + 1] = sum_[i] + x[i];
    sum_sq_[i + 1] = sum_sq_[i] + x[i] * x[i];
  }
}

double SegmentCost::operator()(std::size_t begin, std::size_t end) const {
  const double len = static_cast<double>(end - begin);
  const double s = sum_[end] - sum_[begin];
  const double c = (sum_sq_[end] - sum_sq_[begin]) - s * s / len;
  return std::max(c, 0.0);
}

double difference_variance(std::span<const double> x) {
  if (x.size() < 3) throw ParameterError("difference variance needs at least 3 values");
  std::vector<double> d(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
  const double med = quantile(d, 0.5);
  for (auto& v : d) v = std::abs(v - med);
  const double mad = quantile(d, 0.5) / 0.6745;
  const double floor = 1e-10 * std::max(1.0, variance(x));
  return std::max(mad * mad / 2.0, floor);
}

double default_penalty(std::span<const double> x) {
  return 2.0 * std::log(static_cast<double>(x.size())) * difference_variance(x);
}

std::vector<std::size_t> pelt(std::span<const double> x, const PeltOptions& o) {
  const std::size_t n = x.size();
  if (n < 4) throw ParameterError("pelt needs at least 4 values");
  const double beta = o.penalty.value_or(default_penalty(x));
  if (!(beta >= 0.0)) throw ParameterError("pelt penalty must be non-negative");
  const SegmentCost cost(x);

  // best[t]: optimal penalized cost of x[0, t); last[t]: start of its final segment.
  std::vector<double> best(n + 1, 0.0);
  std::vector<std::size_t> last(n + 1, 0);
  best[0] = -beta;
  std::vector<std::size_t> candidates{0};
  std::vector<double> value;
  for (std::size_t t = 1; t <= n; ++t) {
    value.resize(candidates.size());
    double f = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const std::size_t s = candidates[k];
      value[k] = best[s] + cost(s, t) + beta;
      if (value[k] < f || (value[k] == f && s < arg)) {
        f = value[k];
        arg = s;
      }
    }
    best[t] = f;
    last[t] = arg;
    // Drop candidates that can no longer win: best[s] + cost(s, t) > best[t].
    std::vector<std::size_t> kept;
    for (std::size_t k = 0; k < candidates.size(); ++k)
      if (value[k] - beta <= f) kept.push_back(candidates[k]);
    kept.push_back(t);
    candidates = std::move(kept);
  }
  std::vector<std::size_t> cps;
  for (std::size_t t = n; last[t] > 0; t = last[t]) cps.push_back(last[t]);
  std::reverse(cps.begin(), cps.end());
  return cps;
}

}  // namespace overlap::stats
