#include "overlap/stats/dip.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <random>
#include <tuple>

#include "overlap/error.hpp"

namespace overlap::stats {

namespace {

double f(std::size_t i) { return static_cast<double>(i); }

// Greatest convex minorant / least concave majorant bookkeeping on the
// points (x_i, i), 1-based. Distances are measured in counts and halved at
// the end, following the published algorithm (Hartigan & Hartigan 1985,
// AS 217).
struct DipSolver {
  const std::vector<double>& x;  // x[1..n], sorted; x[0] unused
  std::size_t n;
  std::vector<std::size_t> minorant_prev, majorant_next;
  std::vector<std::size_t> gcm, lcm;  // hull knots of the current window

  explicit DipSolver(const std::vector<double>& sorted) : x(sorted), n(sorted.size() - 1) {
    minorant_prev.assign(n + 1, 0);
    majorant_next.assign(n + 1, 0);
    // Convex minorant from the left: previous knot of the hull ending at j.
    minorant_prev[1] = 1;
    for (std::size_t j = 2; j <= n; ++j) {
      std::size_t k = j - 1;
      while (k != 1) {
        const std::size_t kk = minorant_prev[k];
        // Keep k if the slope (kk -> k) is below the slope (k -> j).
        if ((x[j] - x[k]) * (f(k) - f(kk)) < (x[k] - x[kk]) * (f(j) - f(k))) break;
        k = kk;
      }
      minorant_prev[j] = k;
    }
    // Concave majorant from the right: next knot of the hull starting at k.
    majorant_next[n] = n;
    for (std::size_t k = n - 1; k >= 1; --k) {
      std::size_t j = k + 1;
      while (j != n) {
        const std::size_t jj = majorant_next[j];
        if ((x[k] - x[j]) * (f(j) - f(jj)) < (x[j] - x[jj]) * (f(k) - f(j))) break;
        j = jj;
      }
      majorant_next[k] = j;
      if (k == 1) break;
    }
  }

  // Largest count deviation of the empirical CDF below the chord between
  // knots a < b of the minorant.
  double minorant_gap(std::size_t a, std::size_t b) const {
    double worst = 1.0;
    if (b - a <= 1) return worst;
    for (std::size_t i = a; i <= b; ++i) {
      const double chord = (x[i] - x[a]) * (f(b) - f(a)) / (x[b] - x[a]);
      worst = std::max(worst, f(i) - f(a) + 1.0 - chord);
    }
    return worst;
  }

  // Largest count deviation above the chord between majorant knots a < b.
  double majorant_gap(std::size_t a, std::size_t b) const {
    double worst = 1.0;
    if (b - a <= 1) return worst;
    for (std::size_t i = a; i <= b; ++i) {
      const double chord = (x[i] - x[a]) * (f(b) - f(a)) / (x[b] - x[a]);
      worst = std::max(worst, chord - (f(i) - f(a) - 1.0));
    }
    return worst;
  }

  DipResult solve() {
    std::size_t low = 1, high = n;
    double dip = 1.0;
    while (true) {
      // Minorant knots from high down to low, majorant knots from low up.
      gcm.assign(1, 0);
      gcm.push_back(high);
      while (gcm.back() > low) gcm.push_back(minorant_prev[gcm.back()]);
      const std::size_t n_gcm = gcm.size() - 1;
      lcm.assign(1, 0);
      lcm.push_back(low);
      while (lcm.back() < high) lcm.push_back(majorant_next[lcm.back()]);
      const std::size_t n_lcm = lcm.size() - 1;

      // Widest vertical separation between the two hulls over [low, high].
      std::size_t ig = n_gcm, ih = n_lcm;
      double d = 0.0;
      if (n_gcm != 2 || n_lcm != 2) {
        std::size_t ix = n_gcm - 1, iv = 2;
        do {
          const std::size_t g = gcm[ix], l = lcm[iv];
          if (g > l) {
            const std::size_t g1 = gcm[ix + 1];
            const double dx = (f(l) - f(g1) + 1.0) - (x[l] - x[g1]) * (f(g) - f(g1)) / (x[g] - x[g1]);
            ++iv;
            if (dx >= d) {
              d = dx;
              ig = ix + 1;
              ih = iv - 1;
            }
          } else {
            const std::size_t l1 = lcm[iv - 1];
            const double dx = (x[g] - x[l1]) * (f(l) - f(l1)) / (x[l] - x[l1]) - (f(g) - f(l1) - 1.0);
            --ix;
            if (dx >= d) {
              d = dx;
              ig = ix + 1;
              ih = iv;
            }
          }
          ix = std::max<std::size_t>(ix, 1);
          iv = std::min(iv, n_lcm);
        } while (gcm[ix] != lcm[iv]);
      } else {
        d = 1.0;
      }
      if (d < dip) break;

      double dip_l = 0.0, dip_u = 0.0;
      for (std::size_t j = ig; j < n_gcm; ++j) dip_l = std::max(dip_l, minorant_gap(gcm[j + 1], gcm[j]));
      for (std::size_t j = ih; j < n_lcm; ++j) dip_u = std::max(dip_u, majorant_gap(lcm[j], lcm[j + 1]));
      dip = std::max({dip, dip_l, dip_u});

      if (low == gcm[ig] && high == lcm[ih]) break;
      low = gcm[ig];
      high = lcm[ih];
    }
    DipResult r;
    r.statistic = dip / (2.0 * static_cast<double>(n));
    r.modal_low = x[low];
    r.modal_high = x[high];
    return r;
  }
};

}  // namespace

DipResult dip_fit(std::span<const double> sample) {
  if (sample.empty()) throw ParameterError("dip of an empty sample");
  std::vector<double> x(1, 0.0);
  x.insert(x.end(), sample.begin(), sample.end());
  std::sort(x.begin() + 1, x.end());
  const std::size_t n = sample.size();
  if (n == 1 || x[1] == x[n]) {
    DipResult r;
    r.statistic = 1.0 / (2.0 * static_cast<double>(n));
    r.modal_low = x[1];
    r.modal_high = x[n];
    return r;
  }
  return DipSolver(x).solve();
}

double dip_statistic(std::span<const double> sample) { return dip_fit(sample).statistic; }

const std::vector<double>& dip_null_distribution(std::size_t n, std::size_t draws, std::uint64_t seed) {
  static std::mutex mu;
  static std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, std::vector<double>> cache;
  std::lock_guard lock(mu);
  auto key = std::make_tuple(n, draws, seed);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<double> dips(draws);
  std::vector<double> u(n);
  for (std::size_t k = 0; k < draws; ++k) {
    // Counter-based stream per replicate so results do not depend on order.
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& v : u) v = unif(rng);
    dips[k] = dip_statistic(u);
  }
  std::sort(dips.begin(), dips.end());
  return cache.emplace(key, std::move(dips)).first->second;
}

DipResult dip_test(std::span<const double> sample, std::uint64_t seed, std::size_t draws) {
  if (sample.size() < 10) throw ParameterError("dip test needs at least 10 values");
  if (draws == 0) throw ParameterError("dip test needs at least one Monte-Carlo draw");
  const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
  if (*lo == *hi) throw DegenerateError("dip test on a constant sample");
  DipResult r = dip_fit(sample);
  const auto& null = dip_null_distribution(sample.size(), draws, seed);
  const auto at_least = static_cast<double>(null.end() - std::lower_bound(null.begin(), null.end(), r.statistic));
  r.p_value = (at_least + 1.0) / (static_cast<double>(draws) + 1.0);
  r.draws = draws;
  return r;
}

}  // namespace overlap::stats
