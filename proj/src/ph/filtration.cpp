#include "overlap/ph/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "overlap/error.hpp"

namespace overlap::ph {

std::string_view to_string(FiltrationKind kind) {
  switch (kind) {
    case FiltrationKind::rips: return "rips";
    case FiltrationKind::witness: return "witness";
    case FiltrationKind::dtm: return "dtm";
  }
  return "unknown";
}

namespace {

bool simplex_less(const Simplex& x, const Simplex& y) {
  if (x.value != y.value) return x.value < y.value;
  if (x.dim != y.dim) return x.dim < y.dim;
  return x.vertices < y.vertices;
}

// Enumerates every simplex up to `top_dim` over local vertices 0..m-1 whose
// edges are all admitted. `ids` maps local to global vertex ids (increasing).
// `edge_ok(i, j)` admits an edge, `value_of(simplex_local)` gives its value and
// `critical_of` its critical edge (local ids).
struct CliqueBuilder {
  std::size_t m;
  int top_dim;
  std::function<bool(std::size_t, std::size_t)> edge_ok;
  std::function<double(std::span<const std::size_t>)> value_of;
  std::function<Edge(std::span<const std::size_t>)> critical_of;
  std::function<double(std::size_t)> vertex_value;
  const std::vector<Vertex>* ids;

  std::vector<Simplex> build() const {
    std::vector<Simplex> out;
    std::vector<std::vector<std::size_t>> nbrs(m);  // higher-index neighbours
    std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (edge_ok(i, j)) {
          adj[i][j] = adj[j][i] = 1;
          nbrs[i].push_back(j);
        }

    auto emit = [&](std::span<const std::size_t> local) {
      if (out.size() >= kMaxSimplices) {
        throw CapacityError("filtration exceeds the simplex budget of " + std::to_string(kMaxSimplices));
      }
      Simplex s;
      s.dim = static_cast<int>(local.size()) - 1;
      for (std::size_t t = 0; t < local.size(); ++t) s.vertices[t] = (*ids)[local[t]];
      if (s.dim == 0) {
        s.value = vertex_value(local[0]);
      } else {
        s.value = value_of(local);
        s.critical = critical_of ? critical_of(local) : Edge{};
      }
      out.push_back(s);
    };

    std::array<std::size_t, 4> cur{};
    for (std::size_t i = 0; i < m; ++i) {
      cur[0] = i;
      emit({cur.data(), 1});
      if (top_dim < 1) continue;
      for (std::size_t j : nbrs[i]) {
        cur[1] = j;
        emit({cur.data(), 2});
        if (top_dim < 2) continue;
        for (std::size_t k : nbrs[j]) {
          if (!adj[i][k]) continue;
          cur[2] = k;
          emit({cur.data(), 3});
          if (top_dim < 3) continue;
          for (std::size_t l : nbrs[k]) {
            if (!adj[i][l] || !adj[j][l]) continue;
            cur[3] = l;
            emit({cur.data(), 4});
          }
        }
      }
    }
    std::sort(out.begin(), out.end(), simplex_less);
    return out;
  }
};

void check_capacity(std::size_t n, int max_dim) {
  if (max_dim < 0 || max_dim > 2) throw ParameterError("max_dim must be 0, 1 or 2");
  if (max_dim <= 1 && n > 2048) throw CapacityError("n = " + std::to_string(n) + " exceeds 2048 for max_dim <= 1");
  if (max_dim == 2 && n > 512) throw CapacityError("n = " + std::to_string(n) + " exceeds 512 for max_dim = 2");
}

// Largest pairwise distance among `local`, ties broken towards the
// lexicographically smaller global pair.
std::pair<double, Edge> diameter(std::span<const std::size_t> local, const std::vector<double>& dm, std::size_t n,
                                 const std::vector<Vertex>& ids) {
  double best = -1.0;
  Edge e;
  for (std::size_t a = 0; a < local.size(); ++a)
    for (std::size_t b = a + 1; b < local.size(); ++b) {
      const double d = dm[local[a] * n + local[b]];
      if (d > best) {
        best = d;
        e = Edge{ids[local[a]], ids[local[b]]};
      }
    }
  return {best, e};
}

}  // namespace

Filtration rips_filtration(const PointCloud& pc, int max_dim, std::optional<double> max_scale) {
  const std::size_t n = pc.size();
  check_capacity(n, max_dim);
  if (max_scale && !(*max_scale > 0.0)) throw ParameterError("max_scale must be positive");
  const double scale = max_scale.value_or(pc.enclosing_ball_diameter());
  const auto dm = pc.distance_matrix();
  std::vector<Vertex> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<Vertex>(i);

  CliqueBuilder builder{
      n,
      max_dim + 1,
      [&](std::size_t i, std::size_t j) { return dm[i * n + j] <= scale; },
      [&](std::span<const std::size_t> s) { return diameter(s, dm, n, ids).first; },
      [&](std::span<const std::size_t> s) { return diameter(s, dm, n, ids).second; },
      [](std::size_t) { return 0.0; },
      &ids};
  Filtration f;
  f.simplices = builder.build();
  f.kind = FiltrationKind::rips;
  f.n_vertices = n;
  f.max_dim = max_dim;
  f.differentiable = true;
  return f;
}

std::vector<Vertex> maxmin_landmarks(const PointCloud& pc, std::size_t m) {
  const std::size_t n = pc.size();
  if (m < 1 || m > n) throw ParameterError("landmark count must satisfy 1 <= m <= n");
  std::vector<Vertex> chosen{0};
  std::vector<double> mind(n);
  for (std::size_t i = 0; i < n; ++i) mind[i] = pc.distance(0, i);
  while (chosen.size() < m) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mind[i] > best_d) {
        best_d = mind[i];
        best = i;
      }
    chosen.push_back(static_cast<Vertex>(best));
    for (std::size_t i = 0; i < n; ++i) mind[i] = std::min(mind[i], pc.distance(best, i));
  }
  return chosen;
}

Filtration witness_filtration(const PointCloud& pc, std::size_t m, int max_dim, int relaxation) {
  const std::size_t n = pc.size();
  if (m < 2 || m > n) throw ParameterError("witness_filtration needs 2 <= m <= n");
  if (relaxation < 0 || static_cast<std::size_t>(relaxation) > m) throw ParameterError("witness relaxation must lie in [0, m]");
  check_capacity(m, max_dim);
  auto landmarks = maxmin_landmarks(pc, m);
  std::sort(landmarks.begin(), landmarks.end());

  std::vector<std::size_t> witnesses;
  for (std::size_t w = 0; w < n; ++w)
    if (!std::binary_search(landmarks.begin(), landmarks.end(), static_cast<Vertex>(w))) witnesses.push_back(w);
  if (witnesses.empty()) {
    witnesses.resize(n);
    std::iota(witnesses.begin(), witnesses.end(), 0);
  }

  // dist[t * m + l]: witness t to landmark l; slack[t]: distance to the
  // relaxation-th nearest landmark.
  const std::size_t nw = witnesses.size();
  std::vector<double> dist(nw * m), slack(nw, 0.0), sorted(m);
  for (std::size_t t = 0; t < nw; ++t) {
    for (std::size_t l = 0; l < m; ++l) sorted[l] = dist[t * m + l] = pc.distance(witnesses[t], landmarks[l]);
    if (relaxation > 0) {
      std::nth_element(sorted.begin(), sorted.begin() + relaxation - 1, sorted.end());
      slack[t] = sorted[static_cast<std::size_t>(relaxation - 1)];
    }
  }

  auto witness_value = [&](std::span<const std::size_t> s) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < nw; ++t) {
      double worst = 0.0;
      for (std::size_t l : s) worst = std::max(worst, dist[t * m + l]);
      best = std::min(best, std::max(0.0, worst - slack[t]));
    }
    return 2.0 * best;
  };

  CliqueBuilder builder{m,
                        max_dim + 1,
                        [](std::size_t, std::size_t) { return true; },
                        witness_value,
                        nullptr,
                        [](std::size_t) { return 0.0; },
                        &landmarks};
  Filtration f;
  f.simplices = builder.build();
  f.kind = FiltrationKind::witness;
  f.n_vertices = m;
  f.max_dim = max_dim;
  return f;
}

std::vector<double> dtm_values(const PointCloud& pc, std::size_t k) {
  const std::size_t n = pc.size();
  if (k < 1 || k >= n) throw ParameterError("dtm needs 1 <= k < n");
  std::vector<double> out(n);
  std::vector<double> row(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t t = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) {
        const double d = pc.distance(i, j);
        row[t++] = d * d;
      }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += row[j];
    out[i] = std::sqrt(s / static_cast<double>(k));
  }
  return out;
}

Filtration dtm_filtration(const PointCloud& pc, std::size_t k, int max_dim) {
  const std::size_t n = pc.size();
  check_capacity(n, max_dim);
  const auto dtm = dtm_values(pc, k);
  const auto dm = pc.distance_matrix();
  std::vector<Vertex> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<Vertex>(i);

  auto value = [&](std::span<const std::size_t> s) {
    double v = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
      v = std::max(v, dtm[s[a]]);
      for (std::size_t b = a + 1; b < s.size(); ++b) v = std::max(v, 0.5 * dm[s[a] * n + s[b]]);
    }
    return v;
  };
  CliqueBuilder builder{n,
                        max_dim + 1,
                        [](std::size_t, std::size_t) { return true; },
                        value,
                        nullptr,
                        [&](std::size_t i) { return dtm[i]; },
                        &ids};
  Filtration f;
  f.simplices = builder.build();
  f.kind = FiltrationKind::dtm;
  f.n_vertices = n;
  f.max_dim = max_dim;
  return f;
}

}  // namespace overlap::ph
