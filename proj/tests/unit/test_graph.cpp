#include <algorithm>
#include <functional>
#include <set>

#include "doctest.h"
#include "hsfluct/flow.hpp"
#include "hsfluct/graph.hpp"

using namespace hsfluct;

namespace {

CollisionGraph graph_of(int n, std::vector<std::pair<int, int>> pairs) {
  CollisionGraph g;
  g.vertices = n;
  double t = 0.0;
  for (auto [i, j] : pairs) g.edges.push_back({i, j, t += 1.0});
  return g;
}

// Flood-fill components of an adjacency structure.
int count_components(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> seen(n, 0);
  int comps = 0;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++comps;
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : adj[u])
        if (!seen[w]) seen[w] = 1, stack.push_back(w);
    }
  }
  return comps;
}

Configuration line_config(const std::vector<std::pair<double, double>>& xv, double eps) {
  Configuration c;
  c.d = 2;
  c.epsilon = eps;
  for (auto [x, v] : xv) c.particles.push_back({Vec{x, 0.5}, Vec{v, 0.0}});
  return c;
}

}  // namespace

TEST_CASE("collision graph of an empty window has no edges") {
  const Configuration c = line_config({{0.1, 1.0}, {0.4, -1.0}}, 0.1);
  const FlowResult r = run_flow(c, 1.0);
  REQUIRE_FALSE(r.log.events.empty());
  const CollisionGraph g = collision_graph(r.log, 2, 0.0, r.log.events[0].time * 0.5);
  CHECK(g.vertices == 2);
  CHECK(g.edges.empty());
}

TEST_CASE("three-particle chain gives a path graph") {
  // 0 hits 1, then 1 hits 2, then everyone drifts apart
  const Configuration c = line_config({{0.1, 1.0}, {0.3, 0.0}, {0.5, 0.0}}, 0.05);
  const FlowResult r = run_flow(c, 0.4);
  const CollisionGraph g = collision_graph(r.log, 3, 0.0, 0.4);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0].i == 0);
  CHECK(g.edges[0].j == 1);
  CHECK(g.edges[1].i == 1);
  CHECK(g.edges[1].j == 2);
  CHECK_FALSE(first_cycle_event(g).has_value());
  CHECK(is_connected(g));
}

TEST_CASE("re-encounter across the wrap gives a repeated edge") {
  // after the first contact the pair separates and meets again around the torus
  const Configuration c = line_config({{0.2, 1.0}, {0.5, -1.0}}, 0.1);
  const FlowResult r = run_flow(c, 0.7);
  const CollisionGraph g = collision_graph(r.log, 2, 0.0, 0.7);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0].time == doctest::Approx(0.1));
  // separation 0.9 the long way round closes to 0.1 at relative speed 2
  CHECK(g.edges[1].time == doctest::Approx(0.5));
  const auto cyc = first_cycle_event(g);
  REQUIRE(cyc.has_value());
  CHECK(*cyc == 1);
}

TEST_CASE("first_cycle_event conventions") {
  CHECK_FALSE(first_cycle_event(graph_of(4, {{0, 1}, {1, 2}, {1, 3}})).has_value());
  CHECK(first_cycle_event(graph_of(3, {{0, 1}, {1, 2}, {0, 2}})) == std::optional<std::size_t>(2));
  CHECK(first_cycle_event(graph_of(2, {{0, 1}, {0, 1}})) == std::optional<std::size_t>(1));
}

TEST_CASE("clustering tree examples") {
  const CollisionGraph tree = graph_of(4, {{0, 1}, {2, 3}, {1, 2}});
  CHECK(clustering_tree({tree}) == tree.edges);
  const CollisionGraph tri = graph_of(3, {{0, 1}, {1, 2}, {0, 2}});
  const auto kept = clustering_tree({tri});
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == tri.edges[0]);
  CHECK(kept[1] == tri.edges[1]);
}

TEST_CASE("clustering tree of two graphs merges edges in time order") {
  CollisionGraph a, b;
  a.vertices = b.vertices = 4;
  a.edges = {{0, 1, 0.1}, {2, 3, 0.5}};
  b.edges = {{1, 2, 0.3}, {0, 3, 0.7}, {0, 2, 0.9}};
  const auto kept = clustering_tree({a, b});
  REQUIRE(kept.size() == 3);
  CHECK(kept[0].time == 0.1);
  CHECK(kept[1].time == 0.3);
  CHECK(kept[2].time == 0.5);
}

TEST_CASE("clustering tree matches a brute-force oracle on random graphs") {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + int(rng() % 8);
    std::vector<CollisionGraph> gs(1 + rng() % 2);
    std::vector<std::pair<int, int>> all;
    for (auto& g : gs) {
      g.vertices = n;
      const int m = int(rng() % (2 * n));
      for (int k = 0; k < m; ++k) {
        int i = int(rng() % n), j = int(rng() % n);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        const double t = std::uniform_real_distribution<double>(0, 1)(rng);
        g.edges.push_back({i, j, t});
        all.push_back({i, j});
      }
      std::sort(g.edges.begin(), g.edges.end(),
                [](const Edge& x, const Edge& y) { return x.time < y.time; });
    }
    const auto kept = clustering_tree(gs);
    const int comps = count_components(n, all);
    CHECK(int(kept.size()) == n - comps);
    std::vector<std::pair<int, int>> kp;
    for (const auto& e : kept) kp.push_back({e.i, e.j});
    CHECK(count_components(n, kp) == comps);  // spans every merged component, so acyclic
    for (std::size_t k = 1; k < kept.size(); ++k) CHECK(kept[k - 1].time <= kept[k].time);
  }
}

TEST_CASE("first_cycle_event is empty exactly for forests") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + int(rng() % 6);
    std::vector<std::pair<int, int>> pairs;
    const int m = int(rng() % 7);
    for (int k = 0; k < m; ++k) {
      int i = int(rng() % n), j = int(rng() % n);
      if (i == j) continue;
      pairs.push_back({std::min(i, j), std::max(i, j)});
    }
    const CollisionGraph g = graph_of(n, pairs);
    // forest iff |E| = n - components (repeated edges count)
    const bool forest = int(pairs.size()) == n - count_components(n, pairs);
    CHECK(first_cycle_event(g).has_value() == !forest);
  }
}

TEST_CASE("union-find bookkeeping") {
  UnionFind uf(5);
  CHECK(uf.components() == 5);
  CHECK(uf.unite(0, 1));
  CHECK(uf.unite(3, 4));
  CHECK_FALSE(uf.unite(1, 0));
  CHECK(uf.components() == 3);
  CHECK(uf.find(0) == uf.find(1));
  CHECK(uf.find(2) != uf.find(3));
}

TEST_CASE("distance clusters: singletons and chains") {
  Configuration c;
  c.d = 3;
  c.epsilon = 0.01;
  for (double x : {0.1, 0.4, 0.7}) c.particles.push_back({Vec{x, 0.5, 0.5}, Vec{0, 0, 0}});
  auto cl = distance_clusters(c, 0.2);
  CHECK(cl.size() == 3);
  const double L = 0.1, step = 0.9 * L;
  c.particles.clear();
  for (int k = 0; k < 3; ++k) c.particles.push_back({Vec{0.2 + k * step, 0.5, 0.5}, Vec{0, 0, 0}});
  cl = distance_clusters(c, L);
  REQUIRE(cl.size() == 1);
  CHECK(cl[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("distance clusters match a double-loop flood fill") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    Configuration c;
    c.d = 2 + trial % 2;
    c.epsilon = 0.01;
    for (int i = 0; i < 20; ++i) c.particles.push_back({uniform_torus_point(c.d, rng), Vec(c.d)});
    const double L = 0.15;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 20; ++i)
      for (int j = i + 1; j < 20; ++j)
        if (torus_distance(c.particles[i].x, c.particles[j].x) < L) edges.push_back({i, j});
    const auto cl = distance_clusters(c, L);
    CHECK(int(cl.size()) == count_components(20, edges));
    std::set<int> seen;
    std::vector<int> id(20, -1);
    for (std::size_t k = 0; k < cl.size(); ++k) {
      CHECK(std::is_sorted(cl[k].begin(), cl[k].end()));
      for (int i : cl[k]) {
        CHECK(seen.insert(i).second);
        id[i] = int(k);
      }
    }
    for (auto [i, j] : edges) CHECK(id[i] == id[j]);
    CHECK(seen.size() == 20);
    for (std::size_t a = 1; a < cl.size(); ++a) CHECK(cl[a - 1][0] < cl[a][0]);
  }
}
