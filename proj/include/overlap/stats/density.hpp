#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace overlap::stats {

double mean(std::span<const double> x);
// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> x);
double quantile(std::vector<double> x, double q);

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back to sd when IQR is 0.
double silverman_bandwidth(std::span<const double> x);

struct KdeGrid {
  double bandwidth = 0.0;
  std::vector<double> grid;
  std::vector<double> density;
};

/// Gaussian KDE evaluated on `points` evenly spaced values covering
/// [min - 3h, max + 3h].
KdeGrid kde(std::span<const double> x, std::optional<double> bandwidth = std::nullopt, std::size_t points = 512);

struct KdeOptions {
  std::optional<double> bandwidth;
  std::size_t points = 512;
  // Sign changes where the density is below this fraction of its peak are
  // ignored: far tails of a KDE are sums of a few kernels and wiggle.
  double floor_fraction = 0.01;
};

/// Locations where the second difference of the KDE changes sign, linearly
/// interpolated between grid points. Needs n >= 20; zero variance raises
/// DegenerateError.
std::vector<double> kde_inflections(std::span<const double> x, const KdeOptions& options = {});

/// Local maxima of the KDE (same floor rule), in increasing order.
std::vector<double> kde_modes(std::span<const double> x, const KdeOptions& options = {});

struct Gaussian {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 1.0;
};

struct MixtureFit {
  std::vector<Gaussian> components;  // sorted by mean
  double log_likelihood = 0.0;
  double bic = 0.0;
  int iterations = 0;
};

struct Gmm2Result {
  MixtureFit one;
  MixtureFit two;
  double bic1 = 0.0;
  double bic2 = 0.0;
  std::optional<double> crossover;  // only when bic2 < bic1
};

/// Point between the two means where the weighted densities are equal, if any.
std::optional<double> mixture_crossover(const Gaussian& a, const Gaussian& b);

/// One- and two-component Gaussian mixtures by EM (restarts seeded with
/// k-means++ means, stop when the log-likelihood moves less than 1e-8).
/// Needs n >= 20; raises FitError when every restart degenerates.
Gmm2Result gmm2_bic(std::span<const double> x, std::uint64_t seed, int restarts = 10);

}  // namespace overlap::stats
