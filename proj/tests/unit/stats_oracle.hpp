#pragma once

// Exhaustive reference for changepoints: optimal partitioning without any
// pruning, every segment cost summed from scratch.

#include <algorithm>
#include <limits>
#include <vector>

namespace oracle {

inline std::vector<std::size_t> partition_oracle(const std::vector<double>& x, double beta) {
  const std::size_t n = x.size();
  auto cost = [&](std::size_t s, std::size_t t) {
    double m = 0.0;
    for (std::size_t i = s; i < t; ++i) m += x[i];
    m /= static_cast<double>(t - s);
    double c = 0.0;
    for (std::size_t i = s; i < t; ++i) c += (x[i] - m) * (x[i] - m);
    return c;
  };
  std::vector<double> f(n + 1, 0.0);
  std::vector<std::size_t> back(n + 1, 0);
  f[0] = -beta;
  for (std::size_t t = 1; t <= n; ++t) {
    f[t] = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < t; ++s) {
      const double v = f[s] + cost(s, t) + beta;
      if (v < f[t] - 1e-9) {
        f[t] = v;
        back[t] = s;
      }
    }
  }
  std::vector<std::size_t> cps;
  for (std::size_t t = n; back[t] > 0; t = back[t]) cps.push_back(back[t]);
  std::reverse(cps.begin(), cps.end());
  return cps;
}

}  // namespace oracle
