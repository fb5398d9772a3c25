#include "overlap/ph/bottleneck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace overlap::ph {

namespace {

using Point = std::pair<double, double>;

double linf(const Point& p, const Point& q) {
  return std::max(std::abs(p.first - q.first), std::abs(p.second - q.second));
}

double to_diagonal(const Point& p) { return 0.5 * (p.second - p.first); }

// Hopcroft-Karp on a bipartite graph given by adjacency lists (left -> right).
class HopcroftKarp {
 public:
  HopcroftKarp(std::size_t left, std::size_t right, const std::vector<std::vector<std::size_t>>& adj)
      : adj_(adj), match_l_(left, kNone), match_r_(right, kNone), dist_(left) {}

  std::size_t run() {
    std::size_t matched = 0;
    while (bfs()) {
      for (std::size_t u = 0; u < match_l_.size(); ++u)
        if (match_l_[u] == kNone && dfs(u)) ++matched;
    }
    return matched;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  bool bfs() {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t u = 0; u < match_l_.size(); ++u) {
      if (match_l_[u] == kNone) {
        dist_[u] = 0;
        q.push(u);
      } else {
        dist_[u] = kNone;
      }
    }
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v : adj_[u]) {
        const std::size_t w = match_r_[v];
        if (w == kNone) {
          found = true;
        } else if (dist_[w] == kNone) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  bool dfs(std::size_t u) {
    for (std::size_t v : adj_[u]) {
      const std::size_t w = match_r_[v];
      if (w == kNone || (dist_[w] == dist_[u] + 1 && dfs(w))) {
        match_l_[u] = v;
        match_r_[v] = u;
        return true;
      }
    }
    dist_[u] = kNone;
    return false;
  }

  const std::vector<std::vector<std::size_t>>& adj_;
  std::vector<std::size_t> match_l_, match_r_, dist_;
};

// Left: a[0..p) then diagonal copies of b. Right: b[0..q) then diagonal
// copies of a.
bool feasible(const std::vector<Point>& a, const std::vector<Point>& b, double eps) {
  const std::size_t p = a.size(), q = b.size();
  std::vector<std::vector<std::size_t>> adj(p + q);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j)
      if (linf(a[i], b[j]) <= eps) adj[i].push_back(j);
    if (to_diagonal(a[i]) <= eps) adj[i].push_back(q + i);
  }
  for (std::size_t j = 0; j < q; ++j) {
    if (to_diagonal(b[j]) <= eps) adj[p + j].push_back(j);
    for (std::size_t i = 0; i < p; ++i) adj[p + j].push_back(q + i);
  }
  HopcroftKarp hk(p + q, p + q, adj);
  return hk.run() == p + q;
}

std::vector<Point> finite_points(const PersistenceDiagram& d, int dim) {
  std::vector<Point> out;
  for (const auto& f : d.features)
    if (f.dim == dim && !f.essential()) out.emplace_back(f.birth, f.death);
  return out;
}

std::vector<double> essential_births(const PersistenceDiagram& d, int dim) {
  std::vector<double> out;
  for (const auto& f : d.features)
    if (f.dim == dim && f.essential()) out.push_back(f.birth);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double bottleneck_finite(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<double> candidates{0.0};
  for (const auto& p : a) candidates.push_back(to_diagonal(p));
  for (const auto& q : b) candidates.push_back(to_diagonal(q));
  for (const auto& p : a)
    for (const auto& q : b) candidates.push_back(linf(p, q));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // Matching everything to the diagonal is always feasible at the largest
  // diagonal cost, so the last candidate is feasible.
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(a, b, candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return candidates[lo];
}

BottleneckResult bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim) {
  const auto ea = essential_births(a, dim);
  const auto eb = essential_births(b, dim);
  if (ea.size() != eb.size()) return {std::numeric_limits<double>::infinity(), true};
  double essential = 0.0;
  for (std::size_t i = 0; i < ea.size(); ++i) essential = std::max(essential, std::abs(ea[i] - eb[i]));
  return {std::max(essential, bottleneck_finite(finite_points(a, dim), finite_points(b, dim))), false};
}

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim) {
  return bottleneck(a, b, dim).distance;
}

double tsas(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  const double norm = 0.5 * std::max(a.max_finite_lifetime(1), b.max_finite_lifetime(1));
  if (norm == 0.0) return 0.0;
  return bottleneck_finite(finite_points(a, 1), finite_points(b, 1)) / norm;
}

double tsas(const PointCloud& traj_a, const PointCloud& traj_b) {
  return tsas(compute_persistence(rips_filtration(traj_a, 1)), compute_persistence(rips_filtration(traj_b, 1)));
}

}  // namespace overlap::ph
