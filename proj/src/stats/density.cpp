#include "overlap/stats/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "overlap/error.hpp"

namespace overlap::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw ParameterError("mean of an empty series");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw ParameterError("variance needs at least two values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw ParameterError("quantile of an empty series");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double silverman_bandwidth(std::span<const double> x) {
  const double sd = std::sqrt(variance(x));
  std::vector<double> v(x.begin(), x.end());
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

KdeGrid kde(std::span<const double> x, std::optional<double> bandwidth, std::size_t points) {
  if (x.size() < 2) throw ParameterError("kde needs at least two values");
  if (points < 3) throw ParameterError("kde grid needs at least three points");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw DegenerateError("kde of a zero-variance sample");
  KdeGrid k;
  k.bandwidth = bandwidth.value_or(silverman_bandwidth(x));
  if (!(k.bandwidth > 0.0)) throw ParameterError("kde bandwidth must be positive");
  const double a = *lo - 3.0 * k.bandwidth, b = *hi + 3.0 * k.bandwidth;
  const double norm = 1.0 / (static_cast<double>(x.size()) * k.bandwidth * std::sqrt(2.0 * std::numbers::pi));
  k.grid.resize(points);
  k.density.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double g = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    double s = 0.0;
    for (double v : x) {
      const double u = (g - v) / k.bandwidth;
      s += std::exp(-0.5 * u * u);
    }
    k.grid[i] = g;
    k.density[i] = s * norm;
  }
  return k;
}

namespace {

KdeGrid checked_kde(std::span<const double> x, const KdeOptions& o) {
  if (x.size() < 20) throw ParameterError("kde analysis needs at least 20 values");
  return kde(x, o.bandwidth, o.points);
}

}  // namespace

std::vector<double> kde_inflections(std::span<const double> x, const KdeOptions& o) {
  const auto k = checked_kde(x, o);
  const double peak = *std::max_element(k.density.begin(), k.density.end());
  const double floor = o.floor_fraction * peak;
  // Second difference at interior grid point i.
  std::vector<double> d2(k.grid.size(), 0.0);
  for (std::size_t i = 1; i + 1 < k.grid.size(); ++i) d2[i] = k.density[i - 1] - 2.0 * k.density[i] + k.density[i + 1];
  std::vector<double> out;
  for (std::size_t i = 1; i + 2 < k.grid.size(); ++i) {
    if ((d2[i] < 0.0) == (d2[i + 1] < 0.0) || d2[i] == d2[i + 1]) continue;
    if (std::max(k.density[i], k.density[i + 1]) < floor) continue;
    const double frac = d2[i] / (d2[i] - d2[i + 1]);
    out.push_back(k.grid[i] + frac * (k.grid[i + 1] - k.grid[i]));
  }
  return out;
}

std::vector<double> kde_modes(std::span<const double> x, const KdeOptions& o) {
  const auto k = checked_kde(x, o);
  const double peak = *std::max_element(k.density.begin(), k.density.end());
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < k.grid.size(); ++i) {
    if (k.density[i] > k.density[i - 1] && k.density[i] >= k.density[i + 1] && k.density[i] >= o.floor_fraction * peak) {
      out.push_back(k.grid[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------- mixtures

namespace {

double log_normal_pdf(double x, const Gaussian& g) {
  const double d = x - g.mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * g.variance) + d * d / g.variance);
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

constexpr double kMinVariance = 1e-12;

// k-means++ choice of two means.
std::pair<double, double> seed_means(std::span<const double> x, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  const double first = x[pick(rng)];
  std::vector<double> w(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) total += (w[i] = (x[i] - first) * (x[i] - first));
  if (total == 0.0) return {first, first};
  std::uniform_real_distribution<double> u(0.0, total);
  double r = u(rng);
  for (std::size_t i = 0; i < x.size(); ++i) {
    r -= w[i];
    if (r <= 0.0) return {first, x[i]};
  }
  return {first, x.back()};
}

std::optional<MixtureFit> em_two(std::span<const double> x, double m1, double m2, double var0) {
  const auto n = static_cast<double>(x.size());
  Gaussian a{0.5, m1, var0}, b{0.5, m2, var0};
  std::vector<double> resp(x.size());
  double prev = -std::numeric_limits<double>::infinity();
  MixtureFit fit;
  for (int it = 1; it <= 5000; ++it) {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double la = std::log(a.weight) + log_normal_pdf(x[i], a);
      const double lb = std::log(b.weight) + log_normal_pdf(x[i], b);
      const double lse = log_sum_exp(la, lb);
      resp[i] = std::exp(la - lse);
      ll += lse;
    }
    fit.iterations = it;
    fit.log_likelihood = ll;
    if (std::abs(ll - prev) < 1e-8) break;
    prev = ll;
    double ra = 0.0, sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      ra += resp[i];
      sa += resp[i] * x[i];
      sb += (1.0 - resp[i]) * x[i];
    }
    const double rb = n - ra;
    if (ra <= 0.0 || rb <= 0.0) return std::nullopt;
    a.mean = sa / ra;
    b.mean = sb / rb;
    double va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      va += resp[i] * (x[i] - a.mean) * (x[i] - a.mean);
      vb += (1.0 - resp[i]) * (x[i] - b.mean) * (x[i] - b.mean);
    }
    a.variance = va / ra;
    b.variance = vb / rb;
    a.weight = ra / n;
    b.weight = rb / n;
    if (a.variance < kMinVariance || b.variance < kMinVariance) return std::nullopt;
  }
  if (a.mean > b.mean) std::swap(a, b);
  fit.components = {a, b};
  fit.bic = -2.0 * fit.log_likelihood + 5.0 * std::log(n);
  return fit;
}

}  // namespace

std::optional<double> mixture_crossover(const Gaussian& a_in, const Gaussian& b_in) {
  Gaussian a = a_in, b = b_in;
  if (a.mean > b.mean) std::swap(a, b);
  if (a.mean == b.mean) return std::nullopt;
  auto diff = [&](double x) {
    return (std::log(a.weight) + log_normal_pdf(x, a)) - (std::log(b.weight) + log_normal_pdf(x, b));
  };
  double lo = a.mean, hi = b.mean;
  double flo = diff(lo), fhi = diff(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = diff(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Gmm2Result gmm2_bic(std::span<const double> x, std::uint64_t seed, int restarts) {
  if (x.size() < 20) throw ParameterError("gmm2_bic needs at least 20 values");
  const auto n = static_cast<double>(x.size());
  const double m = mean(x);
  double v = 0.0;
  for (double s : x) v += (s - m) * (s - m);
  v /= n;
  if (v < kMinVariance) throw FitError("gmm2_bic: sample variance is degenerate");

  Gmm2Result r;
  r.one.components = {{1.0, m, v}};
  for (double s : x) r.one.log_likelihood += log_normal_pdf(s, r.one.components[0]);
  r.one.bic = -2.0 * r.one.log_likelihood + 2.0 * std::log(n);
  r.one.iterations = 1;
  r.bic1 = r.one.bic;

  std::mt19937_64 rng(seed);
  std::optional<MixtureFit> best;
  for (int k = 0; k < restarts; ++k) {
    auto [m1, m2] = seed_means(x, rng);
    if (m1 == m2) continue;
    auto fit = em_two(x, m1, m2, v);
    if (fit && (!best || fit->log_likelihood > best->log_likelihood)) best = fit;
  }
  if (!best) throw FitError("gmm2_bic: every EM restart degenerated");
  r.two = *best;
  r.bic2 = r.two.bic;
  if (r.bic2 < r.bic1) r.crossover = mixture_crossover(r.two.components[0], r.two.components[1]);
  return r;
}

}  // namespace overlap::stats
