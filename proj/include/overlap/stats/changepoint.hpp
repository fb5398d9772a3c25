#pragma once

#include <optional>
#include <span>
#include <vector>

namespace overlap::stats {

/// Sum of squared deviations from the segment mean over x[begin, end),
/// via prefix sums. The Gaussian mean-shift negative log-likelihood up to a
/// factor 1 / (2 sigma^2) and a per-point constant.
class SegmentCost {
 public:
  explicit SegmentCost(std::span<const double> x);
  double operator()(std::size_t begin, std::size_t end) const;
  std::size_t size() const { return sum_.size() - 1; }

 private:
  std::vector<double> sum_, sum_sq_;
};

/// Noise variance from first differences: (MAD(diff) / 0.6745)^2 / 2, robust
/// to level shifts. Floored at 1e-10 * max(1, sample variance).
double difference_variance(std::span<const double> x);

/// 2 ln(n) * difference_variance(x).
double default_penalty(std::span<const double> x);

struct PeltOptions {
  std::optional<double> penalty;
};

/// Exact penalized optimal partitioning with pruning. Returns the start index
/// of every segment after the first (so a split between x[49] and x[50] is
/// reported as 50), increasing. Needs n >= 4.
std::vector<std::size_t> pelt(std::span<const double> x, const PeltOptions& options = {});

}  // namespace overlap::stats
