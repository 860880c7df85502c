#include "hsfluct/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace hsfluct {

UnionFind::UnionFind(std::size_t n) : parent_(n), rank_(n, 0), components_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t UnionFind::find(std::size_t a) {
  while (parent_[a] != a) {
    parent_[a] = parent_[parent_[a]];
    a = parent_[a];
  }
  return a;
}

bool UnionFind::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  --components_;
  return true;
}

CollisionGraph collision_graph(const EventLog& log, int vertices, double t0, double t1) {
  CollisionGraph g;
  g.vertices = vertices;
  for (const auto& e : log.events)
    if (e.time >= t0 && e.time <= t1) {
      if (e.i >= vertices || e.j >= vertices)
        throw std::invalid_argument("collision_graph: event references a missing vertex");
      g.edges.push_back({e.i, e.j, e.time});
    }
  return g;
}

std::optional<std::size_t> first_cycle_event(const CollisionGraph& g) {
  UnionFind uf(static_cast<std::size_t>(g.vertices));
  for (std::size_t k = 0; k < g.edges.size(); ++k)
    if (!uf.unite(static_cast<std::size_t>(g.edges[k].i), static_cast<std::size_t>(g.edges[k].j)))
      return k;
  return std::nullopt;
}

bool is_connected(const CollisionGraph& g) {
  if (g.vertices <= 1) return true;
  UnionFind uf(static_cast<std::size_t>(g.vertices));
  for (const auto& e : g.edges) uf.unite(static_cast<std::size_t>(e.i), static_cast<std::size_t>(e.j));
  return uf.components() == 1;
}

std::vector<Edge> clustering_tree(const std::vector<CollisionGraph>& graphs) {
  int n = 0;
  std::vector<Edge> merged;
  for (const auto& g : graphs) {
    n = std::max(n, g.vertices);
    merged.insert(merged.end(), g.edges.begin(), g.edges.end());
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Edge& a, const Edge& b) { return a.time < b.time; });
  UnionFind uf(static_cast<std::size_t>(n));
  std::vector<Edge> kept;
  for (const auto& e : merged)
    if (uf.unite(static_cast<std::size_t>(e.i), static_cast<std::size_t>(e.j))) kept.push_back(e);
  return kept;
}

std::vector<std::vector<int>> distance_clusters(const Configuration& c, double L) {
  if (!(L > 0.0)) throw std::invalid_argument("distance_clusters: L must be positive");
  const std::size_t n = c.size();
  UnionFind uf(n);
  const double l2 = L * L;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (norm2(minimum_image(c.particles[i].x, c.particles[j].x)) < l2) uf.unite(i, j);
  std::map<std::size_t, std::vector<int>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(static_cast<int>(i));
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  return out;
}

}  // namespace hsfluct
