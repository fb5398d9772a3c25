#include "overlap/ph/persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

#include "overlap/error.hpp"

namespace overlap::ph {

std::vector<Feature> PersistenceDiagram::of_dim(int dim) const {
  std::vector<Feature> out;
  for (const auto& f : features)
    if (f.dim == dim) out.push_back(f);
  return out;
}

double PersistenceDiagram::total_persistence(int dim) const {
  double s = 0.0;
  for (const auto& f : features)
    if (f.dim == dim && !f.essential()) s += f.lifetime();
  return s;
}

double PersistenceDiagram::max_finite_lifetime(int dim) const {
  double m = 0.0;
  for (const auto& f : features)
    if (f.dim == dim && !f.essential()) m = std::max(m, f.lifetime());
  return m;
}

std::size_t PersistenceDiagram::count(int dim, bool include_essential) const {
  return static_cast<std::size_t>(std::count_if(features.begin(), features.end(), [&](const Feature& f) {
    return f.dim == dim && (include_essential || !f.essential());
  }));
}

namespace {

using Column = std::vector<std::uint32_t>;

// Boundary columns (face positions, ascending) for every simplex.
std::vector<Column> boundary_columns(const Filtration& f) {
  const auto& sx = f.simplices;
  std::unordered_map<Vertex, std::uint32_t> dense;
  for (const auto& s : sx)
    if (s.dim == 0) dense.emplace(s.vertices[0], static_cast<std::uint32_t>(dense.size()));
  if (dense.size() >= (1u << 16)) throw CapacityError("too many vertices for boundary indexing");

  auto key = [&](std::span<const Vertex> verts, std::size_t skip) {
    std::uint64_t k = 0;
    for (std::size_t t = 0; t < verts.size(); ++t) {
      if (t == skip) continue;
      k = (k << 16) | (dense.at(verts[t]) + 1);
    }
    return k;
  };

  std::unordered_map<std::uint64_t, std::uint32_t> index;
  index.reserve(sx.size() * 2);
  for (std::size_t i = 0; i < sx.size(); ++i) index.emplace(key(sx[i].verts(), 99), static_cast<std::uint32_t>(i));

  std::vector<Column> cols(sx.size());
  for (std::size_t i = 0; i < sx.size(); ++i) {
    const auto& s = sx[i];
    if (s.dim == 0) continue;
    auto verts = s.verts();
    Column c;
    c.reserve(verts.size());
    for (std::size_t skip = 0; skip < verts.size(); ++skip) {
      auto it = index.find(key(verts, skip));
      if (it == index.end()) throw StateError("filtration is missing a face of a simplex");
      if (it->second >= i) throw StateError("filtration lists a face after its coface");
      c.push_back(it->second);
    }
    std::sort(c.begin(), c.end());
    cols[i] = std::move(c);
  }
  return cols;
}

void add_into(Column& target, const Column& source, Column& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

struct Pairing {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (birth, death) positions
  std::vector<char> paired;
};

Pairing reduce(const Filtration& f, Reduction algorithm) {
  const auto& sx = f.simplices;
  const std::size_t n = sx.size();
  std::vector<Column> cols = boundary_columns(f);
  std::vector<std::int64_t> owner(n, -1);  // row -> column whose low it is
  Pairing out;
  out.paired.assign(n, 0);
  Column scratch;

  auto reduce_column = [&](std::size_t j) {
    Column& c = cols[j];
    while (!c.empty()) {
      const std::int64_t k = owner[c.back()];
      if (k < 0) break;
      add_into(c, cols[static_cast<std::size_t>(k)], scratch);
    }
    if (c.empty()) return;
    const std::uint32_t low = c.back();
    owner[low] = static_cast<std::int64_t>(j);
    out.pairs.emplace_back(low, static_cast<std::uint32_t>(j));
    out.paired[low] = out.paired[j] = 1;
  };

  if (algorithm == Reduction::standard) {
    for (std::size_t j = 0; j < n; ++j)
      if (sx[j].dim > 0) reduce_column(j);
  } else {
    int top = 0;
    for (const auto& s : sx) top = std::max(top, s.dim);
    std::vector<char> cleared(n, 0);
    for (int d = top; d >= 1; --d) {
      for (std::size_t j = 0; j < n; ++j) {
        if (sx[j].dim != d) continue;
        if (cleared[j]) {
          cols[j].clear();
          continue;
        }
        reduce_column(j);
        if (!cols[j].empty()) cleared[cols[j].back()] = 1;
      }
    }
  }
  return out;
}

}  // namespace

PersistenceDiagram compute_persistence(const Filtration& f, Reduction algorithm) {
  const auto& sx = f.simplices;
  Pairing pr = reduce(f, algorithm);
  std::sort(pr.pairs.begin(), pr.pairs.end(), [](const auto& a, const auto& b) { return a.second < b.second; });

  PersistenceDiagram pd;
  pd.max_dim = f.max_dim;
  pd.differentiable = f.differentiable;
  for (auto [b, d] : pr.pairs) {
    const Simplex& born = sx[b];
    const Simplex& dies = sx[d];
    if (born.dim > f.max_dim) continue;
    if (dies.value == born.value) continue;
    Feature feat;
    feat.dim = born.dim;
    feat.birth = born.value;
    feat.death = dies.value;
    feat.birth_edge = born.critical;
    feat.death_edge = dies.critical;
    pd.features.push_back(feat);
  }
  for (std::size_t i = 0; i < sx.size(); ++i) {
    if (pr.paired[i] || sx[i].dim > f.max_dim) continue;
    Feature feat;
    feat.dim = sx[i].dim;
    feat.birth = sx[i].value;
    feat.birth_edge = sx[i].critical;
    pd.features.push_back(feat);
  }
  return pd;
}

namespace {

// Accumulates scale * d|p_a - p_b| / d coords into grad.
void edge_length_gradient(const PointCloud& pc, const Edge& e, double scale, std::vector<double>& grad) {
  const std::size_t d = pc.dim();
  const double len = pc.distance(e.a, e.b);
  if (len == 0.0) return;
  auto pa = pc.point(e.a);
  auto pb = pc.point(e.b);
  for (std::size_t k = 0; k < d; ++k) {
    const double u = (pa[k] - pb[k]) / len;
    grad[e.a * d + k] += scale * u;
    grad[e.b * d + k] -= scale * u;
  }
}

}  // namespace

std::vector<double> lifetime_gradient(const PersistenceDiagram& pd, const PointCloud& pc,
                                      std::span<const double> weights, double eps_min) {
  if (!pd.differentiable) throw StateError("persistence diagram carries no critical-edge tags");
  if (weights.size() != pd.features.size()) throw DimensionError("one weight per feature expected");
  std::vector<double> grad(pc.size() * pc.dim(), 0.0);
  for (std::size_t i = 0; i < pd.features.size(); ++i) {
    const Feature& f = pd.features[i];
    const double w = weights[i];
    if (w == 0.0 || f.essential() || f.lifetime() < eps_min) continue;
    if (!f.death_edge.valid() || (f.dim > 0 && !f.birth_edge.valid())) {
      throw StateError("feature is missing its critical edge");
    }
    edge_length_gradient(pc, f.death_edge, w, grad);
    if (f.birth_edge.valid()) edge_length_gradient(pc, f.birth_edge, -w, grad);
  }
  return grad;
}

std::vector<double> diagram_gradients(const PersistenceDiagram& pd, const PointCloud& pc, int dim, double eps_min) {
  std::vector<double> w(pd.features.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = pd.features[i].dim == dim ? 1.0 : 0.0;
  return lifetime_gradient(pd, pc, w, eps_min);
}

}  // namespace overlap::ph
