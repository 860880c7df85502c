#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hsfluct/gibbs.hpp"
#include "hsfluct/fluctuation.hpp"

using namespace hsfluct;

TEST_CASE("boltzmann_grad_mu") {
  CHECK(boltzmann_grad_mu(0.1, 3) == doctest::Approx(100.0));
  CHECK(boltzmann_grad_mu(1.0, 2) == 1.0);
  CHECK(boltzmann_grad_mu(1.0, 3) == 1.0);
  CHECK(boltzmann_grad_mu(0.05, 2) == doctest::Approx(20.0));
  const EnsembleParams p = boltzmann_grad_params(0.08, 3, 1);
  CHECK(p.mu * 0.08 * 0.08 == doctest::Approx(1.0));
}

TEST_CASE("ensemble parameter validation") {
  EnsembleParams p;
  p.epsilon = 0.25;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.epsilon = 0.1;
  p.d = 4;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.d = 3;
  p.mu = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("without exclusion the particle number is Poisson(mu)") {
  EnsembleParams p;
  p.d = 3;
  p.epsilon = 0.1;
  p.mu = 30.0;
  p.exclusion = false;
  p.seed = 314;
  const MeanEstimate n = expectation([](const Configuration& c) { return double(c.size()); }, p, 10000, 1);
  // Poisson: variance mu
  CHECK(std::abs(n.mean - p.mu) < 4.0 * std::sqrt(p.mu / 10000.0));
  const MeanEstimate ratio =
      expectation([&](const Configuration& c) { return double(c.size()) / p.mu; }, p, 10000, 1);
  CHECK(std::abs(ratio.mean - 1.0) < 4.0 * ratio.stderr_);
}

TEST_CASE("Gibbs samples have no overlap and Maxwellian velocities") {
  const EnsembleParams p = boltzmann_grad_params(0.08, 3, 99);
  std::vector<double> comps;
  for (int r = 0; r < 40; ++r) {
    Rng rng = make_stream(p.seed, r);
    const Configuration c = sample_gibbs(p, rng);
    CHECK_FALSE(has_overlap(c));
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        REQUIRE(torus_distance(c.particles[i].x, c.particles[j].x) > p.epsilon);
    for (const auto& q : c.particles)
      for (int k = 0; k < 3; ++k) comps.push_back(q.v[k]);
  }
  const double n = double(comps.size());
  const double m = std::accumulate(comps.begin(), comps.end(), 0.0) / n;
  double s2 = 0.0;
  for (double x : comps) s2 += x * x;
  CHECK(std::abs(m) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("has_overlap sees pairs across the periodic boundary") {
  Configuration c;
  c.d = 2;
  c.epsilon = 0.1;
  c.particles.push_back({Vec{0.01, 0.5}, Vec{0, 0}});
  c.particles.push_back({Vec{0.97, 0.5}, Vec{0, 0}});
  CHECK(has_overlap(c));
  c.particles[1].x[0] = 0.85;
  CHECK_FALSE(has_overlap(c));
}

TEST_CASE("wholesale acceptance rate matches the overlap-free Poisson fraction") {
  // mu = 100 at eps = 0.1 has acceptance near e^-21; mu = 20 keeps it measurable
  EnsembleParams p;
  p.d = 3;
  p.epsilon = 0.1;
  p.mu = 20.0;
  p.seed = 7;
  p.sampler = SamplerKind::kWholesaleRejection;
  const std::size_t R = 3000;
  SamplerStats stats;
  for (std::size_t r = 0; r < R; ++r) {
    Rng rng = make_stream(p.seed, r);
    sample_gibbs(p, rng, &stats);
  }
  const double acc = double(R) / double(stats.attempts);
  const double acc_se = std::sqrt(acc * acc * (1.0 - acc) / double(R));

  // independent oracle: direct overlap test on free Poisson samples
  Rng orng(123456);
  const int M = 20000;
  int clean = 0;
  for (int i = 0; i < M; ++i) clean += has_overlap(sample_poisson(3, 0.1, 20.0, orng)) ? 0 : 1;
  const double q = double(clean) / M;
  const double q_se = std::sqrt(q * (1.0 - q) / M);
  CHECK(std::abs(acc - q) < 3.0 * std::hypot(acc_se, q_se));

  const double formula = std::exp(-p.mu * p.mu * unit_ball_volume(3) * std::pow(p.epsilon, 3) / 2.0);
  CHECK(expected_overlap_pairs(3, 0.1, 20.0) == doctest::Approx(-std::log(formula)));
  // exp(-E[pairs]) ignores clumps of three or more, so only leading order
  CHECK(acc == doctest::Approx(formula).epsilon(0.1));
}

TEST_CASE("rejection budget failure names the acceptance estimate") {
  EnsembleParams p = boltzmann_grad_params(0.1, 3, 1);
  p.sampler = SamplerKind::kWholesaleRejection;
  p.rejection_cap = 3;
  Rng rng(1);
  try {
    sample_gibbs(p, rng);
    FAIL("expected the rejection budget to run out");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("acceptance") != std::string::npos);
  }
}

TEST_CASE("partial and wholesale rejection sample the same law") {
  EnsembleParams p;
  p.d = 3;
  p.epsilon = 0.1;
  p.mu = 20.0;
  p.seed = 2;
  auto count = [](const Configuration& c) { return double(c.size()); };
  auto near_pairs = [](const Configuration& c) {
    // pairs closer than 2 eps: sensitive to the exclusion correlations
    double k = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        k += torus_distance(c.particles[i].x, c.particles[j].x) < 2.0 * c.epsilon ? 1 : 0;
    return k;
  };
  p.sampler = SamplerKind::kPartialRejection;
  const MeanEstimate a = expectation(count, p, 4000, 1), a2 = expectation(near_pairs, p, 4000, 1);
  p.sampler = SamplerKind::kWholesaleRejection;
  p.seed = 3;
  const MeanEstimate b = expectation(count, p, 4000, 1), b2 = expectation(near_pairs, p, 4000, 1);
  CHECK(std::abs(a.mean - b.mean) < 4.0 * std::hypot(a.stderr_, b.stderr_));
  CHECK(std::abs(a2.mean - b2.mean) < 4.0 * std::hypot(a2.stderr_, b2.stderr_));
}

TEST_CASE("exclusion lowers the mean particle number below mu") {
  const EnsembleParams p = boltzmann_grad_params(0.12, 3, 5);
  const MeanEstimate n = expectation([](const Configuration& c) { return double(c.size()); }, p, 500, 1);
  CHECK(n.mean + 4.0 * n.stderr_ < p.mu);
}

TEST_CASE("expectation: constants and odd observables") {
  const EnsembleParams p = boltzmann_grad_params(0.1, 3, 17);
  const MeanEstimate one = expectation([](const Configuration&) { return 1.0; }, p, 50, 1);
  CHECK(one.mean == 1.0);
  CHECK(one.stderr_ == 0.0);
  const TestFunction v1 = make_test_function("v1", 3);
  const MeanEstimate pi =
      expectation([&](const Configuration& c) { return empirical_average(c, v1, p.mu); }, p, 1000, 1);
  CHECK(std::abs(pi.mean) < 4.0 * pi.stderr_);
  CHECK_THROWS_AS(expectation([](const Configuration&) { return 1.0; }, p, 1, 1), std::invalid_argument);
}

TEST_CASE("law of large numbers: mu Var(pi(v1)) stays bounded along the grid") {
  const TestFunction v1 = make_test_function("v1", 3);
  for (double eps : {0.12, 0.08}) {
    const EnsembleParams p = boltzmann_grad_params(eps, 3, 21);
    std::vector<double> xs;
    for (int r = 0; r < 300; ++r) {
      Rng rng = make_stream(p.seed, r);
      xs.push_back(empirical_average(sample_gibbs(p, rng), v1, p.mu));
    }
    const MeanEstimate m = mean_and_stderr(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    const double var = ss / double(xs.size() - 1);
    // mu Var = E[N]/mu <= 1 exactly; allow sampling noise
    CHECK(p.mu * var < 1.3);
  }
}

TEST_CASE("statistics are invariant under relabeling the particles") {
  const EnsembleParams p = boltzmann_grad_params(0.1, 3, 8);
  Rng rng(4);
  Configuration c = sample_gibbs(p, rng);
  const TestFunction g = make_test_function("cos:1,0,2:vsq", 3);
  const double before = empirical_average(c, g, p.mu);
  std::reverse(c.particles.begin(), c.particles.end());
  std::rotate(c.particles.begin(), c.particles.begin() + 3, c.particles.end());
  CHECK(empirical_average(c, g, p.mu) == doctest::Approx(before).epsilon(1e-12));
  CHECK(has_overlap(c) == false);
}
