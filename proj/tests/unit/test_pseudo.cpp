#include <cmath>

#include "doctest.h"
#include "hsfluct/flow.hpp"
#include "hsfluct/pseudo.hpp"

using namespace hsfluct;

namespace {

Configuration head_on() {
  Configuration c;
  c.d = 3;
  c.epsilon = 0.1;
  c.particles.push_back({Vec{0.2, 0.5, 0.5}, Vec{1, 0.2, 0}});
  c.particles.push_back({Vec{0.7, 0.5, 0.5}, Vec{-1, 0, 0}});
  return c;
}

PseudoParams two_to_one(int s, int sbar) {
  PseudoParams p;
  p.n = 2;
  p.m = 1;
  p.s = {s};
  p.sbar = {sbar};
  p.kappa = {0, 0};
  return p;
}

}  // namespace

TEST_CASE("no annihilations and no contacts: free flow, accepted") {
  Configuration c;
  c.d = 3;
  c.epsilon = 0.05;
  c.particles.push_back({Vec{0.1, 0.1, 0.1}, Vec{0.2, 0, 0}});
  c.particles.push_back({Vec{0.6, 0.6, 0.6}, Vec{0, 0.2, 0}});
  PseudoParams p;
  p.n = p.m = 2;
  p.kappa = {0, 0};
  const PseudoTrace tr = run_pseudo(c, p, 1.0);
  CHECK(tr.accepted);
  CHECK(tr.events.empty());
  const FlowResult f = run_flow(c, 1.0);
  for (int i = 0; i < 2; ++i) CHECK(torus_distance(tr.state[i].x, f.state.particles[i].x) < 1e-14);
}

TEST_CASE("n = m with contacts follows the hard-sphere flow") {
  Configuration c = head_on();
  PseudoParams p;
  p.n = p.m = 2;
  p.kappa = {0, 0};
  const PseudoTrace tr = run_pseudo(c, p, 0.5);
  const FlowResult f = run_flow(c, 0.5);
  REQUIRE(tr.events.size() == f.log.events.size());
  CHECK(tr.events[0].kind == PseudoEventKind::kHamiltonian);
  for (int i = 0; i < 2; ++i) {
    CHECK(torus_distance(tr.state[i].x, f.state.particles[i].x) < 1e-12);
    CHECK(norm(tr.state[i].v - f.state.particles[i].v) < 1e-12);
  }
  CHECK(tr.accepted);
}

TEST_CASE("annihilation without deflection: the survivor moves straight") {
  const Configuration c = head_on();
  const double t = 0.5;
  const double contact = run_flow(c, t).log.events.at(0).time;

  // s = -1 inspects the second particle: it is removed, particle 0 survives
  const PseudoTrace keep = run_pseudo(c, two_to_one(-1, -1), t);
  REQUIRE(keep.events.size() == 1);
  CHECK(keep.events[0].kind == PseudoEventKind::kAnnihilation);
  CHECK(keep.events[0].removed == 1);
  CHECK(keep.events[0].time == doctest::Approx(contact).epsilon(1e-12));
  CHECK(keep.accepted);
  const Particle straight = free_flight(c.particles[0], t);
  CHECK(torus_distance(keep.state[0].x, straight.x) < 1e-12);
  CHECK(keep.state[0].v == c.particles[0].v);
  CHECK(keep.iota == 2);

  // s = +1 inspects particle 0, which is removed: survivor set is wrong
  const PseudoTrace drop = run_pseudo(c, two_to_one(1, -1), t);
  CHECK(drop.events[0].removed == 0);
  CHECK_FALSE(drop.accepted);
  CHECK(torus_distance(drop.state[1].x, free_flight(c.particles[1], t).x) < 1e-12);
}

TEST_CASE("annihilation with deflection: the survivor takes the scattered velocity") {
  const Configuration c = head_on();
  const FlowResult f = run_flow(c, 0.5);
  const CollisionEvent& e = f.log.events.at(0);
  const PseudoTrace tr = run_pseudo(c, two_to_one(-1, 1), 0.5);
  REQUIRE(tr.accepted);
  CHECK(tr.events[0].survivor_scattered);
  const auto [vp, vsp] = scatter(e.vi_pre, e.vj_pre, e.eta);
  CHECK(norm(tr.state[0].v - vp) < 1e-14);
  CHECK(norm(tr.state[0].v - f.state.particles[0].v) < 1e-14);
  (void)vsp;
}

TEST_CASE("a positive budget turns the contact into a recollision") {
  const Configuration c = head_on();
  PseudoParams p = two_to_one(-1, 1);
  p.kappa = {0, 1};
  const PseudoTrace tr = run_pseudo(c, p, 0.5);
  REQUIRE(!tr.events.empty());
  CHECK(tr.events[0].kind == PseudoEventKind::kRecollision);
  CHECK(tr.kappa[1] == 0);
}

TEST_CASE("parameter validation") {
  PseudoParams p = two_to_one(1, 1);
  p.s = {0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = two_to_one(1, 1);
  p.kappa = {0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = two_to_one(1, 1);
  p.kappa = {0, -1};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(run_pseudo(head_on(), two_to_one(1, 1), 0.5, 0), std::runtime_error);
}

TEST_CASE("trace invariants on random small systems") {
  Rng rng(808);
  std::uniform_int_distribution<int> coin(0, 1), budget(0, 2);
  int accepted = 0, contacts = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 2 + trial % 3;
    Configuration c;
    c.d = 2 + trial % 2;
    c.epsilon = 0.08;
    bool overlap = false;
    for (int i = 0; i < n; ++i) {
      Vec x(c.d);
      for (int k = 0; k < c.d; ++k) x[k] = 0.5 + 0.15 * (2.0 * std::uniform_real_distribution<double>(0, 1)(rng) - 1.0);
      for (const auto& q : c.particles) overlap |= torus_distance(q.x, x) <= c.epsilon;
      c.particles.push_back({x, maxwellian_sample(c.d, rng)});
    }
    if (overlap) continue;
    PseudoParams p;
    p.n = n;
    p.m = 1 + trial % n;
    for (int i = 0; i < n - p.m; ++i) {
      p.s.push_back(coin(rng) ? 1 : -1);
      p.sbar.push_back(coin(rng) ? 1 : -1);
    }
    for (int i = 0; i < n; ++i) p.kappa.push_back(budget(rng));
    const PseudoTrace tr = run_pseudo(c, p, 0.3);
    contacts += int(tr.events.size());
    int live = 0;
    for (char a : tr.alive) live += a;
    CHECK(tr.iota == n + 1 - live);
    for (std::size_t k = 1; k < tr.energy.size(); ++k)
      CHECK(tr.energy[k] <= tr.energy[k - 1] + 1e-12);
    for (int j = 0; j < n; ++j) CHECK(tr.kappa[j] <= p.kappa[j]);
    int recoll = 0;
    for (const auto& e : tr.events) recoll += e.kind == PseudoEventKind::kRecollision;
    int spent = 0;
    for (int j = 0; j < n; ++j) spent += p.kappa[j] - tr.kappa[j];
    CHECK(recoll == spent);
    if (tr.accepted) {
      ++accepted;
      for (int k : tr.kappa) CHECK(k == 0);
      for (int i = 0; i < n; ++i) CHECK((tr.alive[i] != 0) == (i < p.m));
    }
  }
  CHECK(contacts > 500);
  CHECK(accepted > 50);
}

TEST_CASE("pseudo collision graph lists every contact") {
  const PseudoTrace tr = run_pseudo(head_on(), two_to_one(-1, 1), 0.5);
  const CollisionGraph g = pseudo_collision_graph(tr);
  CHECK(g.vertices == 2);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].i == 0);
  CHECK(g.edges[0].j == 1);
}
