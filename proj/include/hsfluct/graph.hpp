// Collision graphs, cycle detection and distance clusters.
#pragma once

#include <optional>
#include <vector>

#include "hsfluct/core.hpp"
#include "hsfluct/flow.hpp"

namespace hsfluct {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t a);
  /// Returns false when a and b were already connected.
  bool unite(std::size_t a, std::size_t b);
  std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_, rank_;
  std::size_t components_;
};

struct Edge {
  int i = 0, j = 0;
  double time = 0.0;
  bool operator==(const Edge& o) const { return i == o.i && j == o.j && time == o.time; }
};

struct CollisionGraph {
  int vertices = 0;
  std::vector<Edge> edges;  // time order
};

/// One edge per logged collision with time in [t0, t1].
CollisionGraph collision_graph(const EventLog& log, int vertices, double t0, double t1);

/// Index of the first edge that closes a cycle when edges are inserted in
/// time order; a repeated pair closes a cycle.
std::optional<std::size_t> first_cycle_event(const CollisionGraph& g);

bool is_connected(const CollisionGraph& g);

/// Scans the time-merged edges of the graphs and keeps those joining two
/// distinct components.
std::vector<Edge> clustering_tree(const std::vector<CollisionGraph>& graphs);

/// Connected components of {d(x_i, x_j) < L}; each cluster sorted, clusters
/// ordered by smallest member.
std::vector<std::vector<int>> distance_clusters(const Configuration& c, double L);

}  // namespace hsfluct
