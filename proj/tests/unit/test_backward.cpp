#include <cmath>

#include "doctest.h"
#include "hsfluct/backward.hpp"
#include "hsfluct/identity_checks.hpp"

using namespace hsfluct;

namespace {

double maxwell(const Vec& v) {
  return std::pow(2.0 * kPi, -0.5 * v.d) * std::exp(-0.5 * norm2(v));
}

Particle root3() { return {Vec{0.5, 0.5, 0.5}, Vec{0.0, 0.0, 0.0}}; }

Creation make(int parent, int deflect, double time, Vec vbar, Vec eta) {
  Creation c;
  c.parent = parent;
  c.deflect = deflect;
  c.time = time;
  c.vbar = vbar;
  c.eta = eta;
  return c;
}

void check_close(const Vec& a, const Vec& b, double tol) {
  REQUIRE(a.d == b.d);
  for (int i = 0; i < a.d; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(tol).scale(1.0));
}

}  // namespace

TEST_CASE("empty tree is backward free transport") {
  const Particle z1{Vec{0.1, 0.2, 0.3}, Vec{1.0, -0.5, 0.25}};
  const auto xi = backward_characteristic(z1, {}, 0.05, 0.4);
  REQUIRE(xi.size() == 1);
  check_close(xi[0].x, Vec{0.7, 0.4, 0.2}, 1e-12);
  CHECK(xi[0].v == z1.v);
  CHECK(overlap_free(z1, {}, 0.05, 0.4));
  CHECK(tree_weight(z1, {}, 0.4) == doctest::Approx(maxwell(z1.v)));
}

TEST_CASE("non-deflected creation places the child at parent + eps eta") {
  Particle z1{Vec{0.5, 0.5, 0.5}, Vec{1.0, 0.0, 0.0}};
  CollisionTree tr;
  tr.creations.push_back(make(0, -1, 0.25, Vec{0.0, 0.0, 0.0}, Vec{1.0, 0.0, 0.0}));
  const auto xi = backward_characteristic(z1, tr, 0.05, 0.5);
  REQUIRE(xi.size() == 2);
  check_close(xi[0].x, Vec{0.0, 0.5, 0.5}, 1e-12);
  check_close(xi[1].x, Vec{0.5 - 0.25 + 0.05, 0.5, 0.5}, 1e-12);
  CHECK(overlap_free(z1, tr, 0.05, 0.5));
  // weight M(v1) * ((v1 - vbar).eta) * M(vbar) with cross term 1
  CHECK(tree_weight(z1, tr, 0.5) == doctest::Approx(maxwell(z1.v) * maxwell(Vec{0, 0, 0})));
}

TEST_CASE("deflected creation scatters the pair and puts the child at parent - eps eta") {
  Particle z1{Vec{0.5, 0.5, 0.5}, Vec{1.0, 0.0, 0.0}};
  CollisionTree tr;
  const Vec vbar{-1.0, 0.0, 0.0};
  const Vec eta{1.0, 0.0, 0.0};
  tr.creations.push_back(make(0, 1, 0.2, vbar, eta));
  const auto pv = parent_velocities(z1, tr);
  REQUIRE(pv.size() == 1);
  CHECK(pv[0] == z1.v);
  // head-on exchange: parent leaves with -1, child with +1 before the creation
  const auto xi = backward_characteristic(z1, tr, 0.1, 0.5);
  check_close(xi[0].v, Vec{-1.0, 0.0, 0.0}, 1e-15);
  check_close(xi[1].v, Vec{1.0, 0.0, 0.0}, 1e-15);
  // parent: 0.5 - 0.3*1 at time 0.2 then back 0.2 at speed -1
  check_close(xi[0].x, Vec{0.4, 0.5, 0.5}, 1e-12);
  // child: 0.2 - 0.1 at the creation, then back 0.2 at speed +1, wrapped
  check_close(xi[1].x, Vec{0.9, 0.5, 0.5}, 1e-12);
  // cross term (1 - (-1)) = 2
  CHECK(tree_weight(z1, tr, 0.5) == doctest::Approx(2.0 * maxwell(z1.v) * maxwell(vbar)));
}

TEST_CASE("two children on one line overlap backward in time") {
  const Particle z1 = root3();
  CollisionTree tr;
  tr.creations.push_back(make(0, -1, 0.4, Vec{-1.0, 0.0, 0.0}, Vec{1.0, 0.0, 0.0}));
  tr.creations.push_back(make(0, -1, 0.2, Vec{-3.0, 0.0, 0.0}, Vec{1.0, 0.0, 0.0}));
  REQUIRE(is_admissible(z1, tr, 0.5));
  CHECK_FALSE(overlap_free(z1, tr, 0.05, 0.5));
  CHECK(overlap_free(z1, tr, 0.0, 0.5));
  // moving the second child off the line removes the encounter
  tr.creations[1].eta = Vec{0.0, 1.0, 0.0};
  tr.creations[1].vbar = Vec{0.0, -3.0, 0.0};
  CHECK(overlap_free(z1, tr, 0.05, 0.5));
}

TEST_CASE("inadmissible trees are rejected with a reason") {
  const Particle z1 = root3();
  CollisionTree tr;
  tr.creations.push_back(make(0, -1, 0.3, Vec{1.0, 0.0, 0.0}, Vec{1.0, 0.0, 0.0}));
  CHECK(admissibility_error(z1, tr, 0.5).find("not positive") != std::string::npos);
  CHECK_THROWS_AS(backward_characteristic(z1, tr, 0.05, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(overlap_free(z1, tr, 0.05, 0.5), std::invalid_argument);
  CHECK(tree_weight(z1, tr, 0.5) == 0.0);

  tr.creations[0].vbar = Vec{-1.0, 0.0, 0.0};
  CHECK(is_admissible(z1, tr, 0.5));
  CHECK_FALSE(is_admissible(z1, tr, 0.3));
  tr.creations.push_back(make(0, 1, 0.35, Vec{-1.0, 0.0, 0.0}, Vec{1.0, 0.0, 0.0}));
  CHECK(admissibility_error(z1, tr, 0.5).find("decrease") != std::string::npos);
  tr.creations[1].time = 0.1;
  tr.creations[1].parent = 2;
  CHECK(admissibility_error(z1, tr, 0.5).find("parent") != std::string::npos);
  tr.creations[1].parent = 1;
  tr.creations[1].eta = Vec{1.0, 1.0, 0.0};
  CHECK(admissibility_error(z1, tr, 0.5).find("unit") != std::string::npos);
  tr.creations[1].eta = Vec{1.0, 0.0, 0.0};
  tr.creations[1].deflect = 0;
  CHECK(admissibility_error(z1, tr, 0.5).find("deflect") != std::string::npos);
}

TEST_CASE("tree JSON round trip") {
  Rng rng(5);
  const Particle z1{Vec{0.3, 0.6, 0.9}, maxwellian_sample(3, rng)};
  const CollisionTree tr = random_admissible_tree(z1, 5, 0.7, rng);
  const CollisionTree back = tree_from_json(tree_to_json(tr), 3);
  REQUIRE(back.size() == tr.size());
  for (std::size_t k = 0; k < tr.creations.size(); ++k) {
    CHECK(back.creations[k].parent == tr.creations[k].parent);
    CHECK(back.creations[k].deflect == tr.creations[k].deflect);
    CHECK(back.creations[k].time == tr.creations[k].time);
    CHECK(back.creations[k].vbar == tr.creations[k].vbar);
    CHECK(back.creations[k].eta == tr.creations[k].eta);
  }
  CHECK_THROWS_AS(tree_from_json(tree_to_json(tr), 2), std::invalid_argument);
  CHECK_THROWS(tree_from_json("{\"parent\": 0}", 3));
}

TEST_CASE("random trees are admissible and velocities do not depend on epsilon") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 2;
    const Particle z1{uniform_torus_point(d, rng), maxwellian_sample(d, rng)};
    const int n = 1 + trial % 6;
    const CollisionTree tr = random_admissible_tree(z1, n, 1.0, rng);
    CHECK(tr.size() == n);
    CHECK(admissibility_error(z1, tr, 1.0).empty());
    const auto a = backward_characteristic(z1, tr, 0.1, 1.0);
    const auto b = backward_characteristic(z1, tr, 0.0, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].v == b[i].v);
    CHECK(characteristic_deviation(z1, tr, 0.0, 1.0) == 0.0);
  }
}

TEST_CASE("backward characteristic stays within n^(3/2) eps of its eps = 0 limit") {
  Rng rng(2024);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 3;
    const Particle z1{uniform_torus_point(d, rng), maxwellian_sample(d, rng)};
    const int n = 1 + trial % 6;
    const CollisionTree tr = random_admissible_tree(z1, n, 1.0, rng);
    for (double eps : {0.1, 0.01}) {
      const double dev = characteristic_deviation(z1, tr, eps, 1.0);
      const double bound = std::pow(n, 1.5) * eps;
      worst = std::max(worst, dev / bound);
      if (dev > bound) ++violations;
    }
  }
  CHECK(violations == 0);
  CHECK(worst <= 1.0);
}

TEST_CASE("two-particle duality: forward and backward integrals agree") {
  DualityOptions opt;
  opt.d = 3;
  opt.epsilon = 0.1;
  opt.t = 0.4;
  opt.samples = 20000;
  opt.seed = 11;
  auto h = [](const Particle& z) { return 1.0 + z.v[0] + 0.5 * std::cos(2.0 * kPi * z.x[1]); };
  auto g2 = [](const Particle& a, const Particle& b) { return norm2(b.v) + a.v[0] * b.v[1]; };
  for (int sbar : {1, -1}) {
    opt.sbar = sbar;
    const MeanEstimate f = duality_forward(h, g2, opt);
    const MeanEstimate b = duality_backward(h, g2, opt);
    CHECK(f.mean != 0.0);
    CHECK(std::abs(f.mean - b.mean) < 4.0 * std::hypot(f.stderr_, b.stderr_));
  }
}
