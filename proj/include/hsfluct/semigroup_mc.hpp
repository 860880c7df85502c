// Monte Carlo for <h, e^{t(-v.grad_x + L)} g> in L^2(M(v) dv dx).
//
// Writing L = -nu + K with K u(v) = int (u(v') + u(v*') - u(v*)) b M*,
// the solution started from (x, v) is a signed branching process: the
// tagged particle moves backward in x, collides at the exact rate nu(v)
// (thinning against collision_rate_bound), continues with v', and every
// collision spawns the signed pair u(v*') - u(v*) at the collision point.
// Pair members are simulated with shared randomness so that their
// difference stays small.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsfluct/test_functions.hpp"

namespace hsfluct {

struct SemigroupOptions {
  double t = 0.0;
  int n_max = 40;  // maximum collision depth along any branch
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Simulate the two members of each spawned pair with common randomness.
  bool couple_pairs = true;
  /// Follow only the tagged particle (the linear Boltzmann jump process).
  bool tagged_only = false;
  std::size_t node_cap = 2000000;  // per sample
};

struct SemigroupEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t samples = 0;
  int n_max = 0;
  double bias_bound = 0.0;
  std::uint64_t seed = 0;
  /// Accepted collisions per unit of simulated branch time.
  double branching_rate = 0.0;
  double mean_nodes = 0.0;
  /// events_histogram[k]: samples with k accepted collisions (last bin is
  /// "at least").
  std::vector<std::size_t> events_histogram;

  std::string to_json() const;
};

SemigroupEstimate semigroup_mc(const TestFunction& h, const TestFunction& g,
                               const SemigroupOptions& options);

/// <h, P_t g> for the linear Boltzmann jump process (rate nu(v), jump to v'),
/// simulated directly with exponential clocks at the closed-form rate.
SemigroupEstimate jump_process_mc(const TestFunction& h, const TestFunction& g, double t,
                                  std::size_t samples, std::uint64_t seed, unsigned threads = 1);

}  // namespace hsfluct
