#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace overlap::stats {

struct DipResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double modal_low = 0.0;   // modal interval of the closest unimodal fit
  double modal_high = 0.0;
  std::size_t draws = 0;
};

/// Hartigan's dip: sup distance between the empirical CDF and the closest
/// unimodal CDF. Works on a copy; order of the input does not matter.
double dip_statistic(std::span<const double> sample);

/// Dip plus the modal interval of the fit.
DipResult dip_fit(std::span<const double> sample);

/// Dip with a Monte-Carlo p-value: the fraction of `draws` Uniform(0,1)
/// samples of the same size whose dip is at least as large (add-one
/// smoothed). The reference distribution is cached per (n, draws, seed).
/// Requires n >= 10; a constant sample raises DegenerateError.
DipResult dip_test(std::span<const double> sample, std::uint64_t seed, std::size_t draws = 10000);

/// Sorted dips of `draws` uniform samples of size n.
const std::vector<double>& dip_null_distribution(std::size_t n, std::size_t draws, std::uint64_t seed);

}  // namespace overlap::stats
