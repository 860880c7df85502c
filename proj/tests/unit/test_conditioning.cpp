#include <cmath>

#include "doctest.h"
#include "hsfluct/conditioning.hpp"
#include "hsfluct/flow.hpp"
#include "hsfluct/graph.hpp"

using namespace hsfluct;

namespace {

Configuration colinear(const std::vector<std::pair<double, double>>& xv, double eps) {
  Configuration c;
  c.d = 3;
  c.epsilon = eps;
  for (auto [x, v] : xv) c.particles.push_back({Vec{x, 0.5, 0.5}, Vec{v, 0.0, 0.0}});
  return c;
}

}  // namespace

TEST_CASE("conditioning defaults") {
  const ConditioningParams p = ConditioningParams::defaults(0.05, 3);
  CHECK(p.gamma == 4);
  CHECK(p.delta == doctest::Approx(std::pow(0.05, 5.0 / 6.0)));
  CHECK(p.V == doctest::Approx(std::log(20.0)));
  CHECK(p.L == doctest::Approx(2.0 * p.delta * p.V));
  ConditioningParams bad = p;
  bad.delta = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("upsilon grid includes the end time") {
  const auto ts = upsilon_times(0.5, 0.2);
  REQUIRE(ts.size() == 4);
  CHECK(ts[0] == 0.0);
  CHECK(ts[2] == doctest::Approx(0.4));
  CHECK(ts[3] == 0.5);
  CHECK(upsilon_times(0.4, 0.2).size() == 3);
  CHECK(upsilon_times(0.0, 0.2).size() == 1);
}

TEST_CASE("Upsilon: empty configuration passes") {
  Configuration c;
  c.d = 3;
  c.epsilon = 0.05;
  CHECK(check_upsilon(c, 1.0, ConditioningParams::defaults(0.05, 3)).ok);
}

TEST_CASE("Upsilon: a packed cluster of gamma+1 particles fails at time 0") {
  ConditioningParams p;
  p.gamma = 4;
  p.delta = 0.1;
  p.V = 10.0;
  p.L = 0.1;
  const Configuration c =
      colinear({{0.1, 0.0}, {0.16, 0.0}, {0.22, 0.0}, {0.28, 0.0}, {0.34, 0.0}}, 0.05);
  const UpsilonResult r = check_upsilon(c, 0.5, p);
  CHECK_FALSE(r.ok);
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].largest_cluster == 5);
  // gamma particles are still fine
  Configuration four = c;
  four.particles.pop_back();
  CHECK(check_upsilon(four, 0.5, p).ok);
}

TEST_CASE("Upsilon: the energy cap uses the gamma largest speeds, inclusive") {
  ConditioningParams p;
  p.gamma = 2;
  p.delta = 0.1;
  p.V = 2.0;
  p.L = 0.01;
  // |v|^2 = 1, 3, 0.25: the two largest sum to exactly V^2
  Configuration c = colinear({{0.1, 1.0}, {0.4, std::sqrt(3.0)}, {0.7, 0.5}}, 0.01);
  const UpsilonStep s = upsilon_step(c, 0.0, p);
  CHECK(s.top_energy == doctest::Approx(4.0));
  CHECK(s.ok);
  c.particles[0].v[0] = 1.01;
  CHECK_FALSE(upsilon_step(c, 0.0, p).ok);
}

TEST_CASE("Upsilon: failure can appear later along the flow") {
  ConditioningParams p;
  p.gamma = 2;
  p.delta = 0.05;
  p.V = 100.0;
  p.L = 0.1;
  // three particles converge; at t=0 they are spread out
  const Configuration c = colinear({{0.1, 1.0}, {0.4, 0.0}, {0.72, -1.0}}, 0.01);
  const UpsilonResult r = check_upsilon(c, 0.3, p, {}, false);
  CHECK(r.steps.front().ok);
  CHECK_FALSE(r.ok);
  CHECK(r.steps.size() == upsilon_times(0.3, 0.05).size());
}

TEST_CASE("chi: distant pair cannot collide") {
  const Configuration c = colinear({{0.1, 0.1}, {0.6, -0.1}}, 0.01);
  CHECK_FALSE(chi_indicator(c, 0.05));
}

TEST_CASE("chi: a generic pair has no local recollision within a small delta") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    Configuration c;
    c.d = 3;
    c.epsilon = 0.02;
    const Vec x0 = uniform_torus_point(3, rng);
    Vec x1 = x0;
    x1[0] = x0[0] + 0.05;
    c.particles.push_back({x0, maxwellian_sample(3, rng)});
    c.particles.push_back({wrap(x1), maxwellian_sample(3, rng)});
    CHECK_FALSE(chi_indicator(c, 0.05));
  }
}

TEST_CASE("chi: colinear billiard triple re-collides within delta") {
  // A moves right into B at rest; B bounces off C moving left and returns to A.
  // contacts at 0.05 (A,B), 0.06 (B,C), 0.07 (A,B)
  const Configuration c = colinear({{0.30, 1.0}, {0.40, 0.0}, {0.52, -1.0}}, 0.05);
  const FlowResult r = run_flow(c, 0.2);
  const CollisionGraph g = collision_graph(r.log, 3, 0.0, 0.2);
  REQUIRE(g.edges.size() == 3);
  CHECK(g.edges[0].time == doctest::Approx(0.05));
  CHECK(g.edges[1].time == doctest::Approx(0.06));
  CHECK(g.edges[2].time == doctest::Approx(0.07));
  REQUIRE(first_cycle_event(g).has_value());
  CHECK(chi_indicator(c, 0.2));
  // the return trip ends at 0.07
  CHECK_FALSE(chi_indicator(c, 0.065));
}

TEST_CASE("chi: size cap") {
  Configuration c;
  c.d = 3;
  c.epsilon = 0.01;
  for (int i = 0; i < kMaxChiParticles + 1; ++i)
    c.particles.push_back({Vec{0.1 * i, 0.5, 0.5}, Vec{0, 0, 0}});
  CHECK_THROWS_AS(chi_indicator(c, 0.1), std::invalid_argument);
}
