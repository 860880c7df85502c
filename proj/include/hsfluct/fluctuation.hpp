// Empirical and fluctuation fields, and the particle covariance
// E[zeta^t(h) zeta^0(g)] estimated by replicas.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsfluct/conditioning.hpp"
#include "hsfluct/gibbs.hpp"
#include "hsfluct/test_functions.hpp"

namespace hsfluct {

/// pi(g) = (1/mu) sum_i g(z_i).
double empirical_average(const Configuration& c, const TestFunction& g, double mu);

/// zeta(g) = mu^(1/2) (pi(g) - center).
double fluctuation_field(const Configuration& c, const TestFunction& g, double center, double mu);

struct CovarianceParams {
  EnsembleParams ensemble;  // seed and mu live here
  std::size_t replicas = 1000;
  /// Size of the disjoint batch that estimates E[pi^0(h)] and E[pi^0(g)].
  std::size_t centering_replicas = 1000;
  unsigned threads = 1;
  FlowOptions flow;
  /// Upsilon and recollision diagnostics along the same flow.
  bool diagnostics = false;
  ConditioningParams conditioning;
  /// Largest tolerated fraction of aborted replicas.
  double max_failure_fraction = 0.01;

  void validate() const;
};

struct CovarianceResult {
  double t = 0.0;
  double cov = 0.0;
  double stderr_ = 0.0;  // delete-one jackknife
  std::size_t replicas = 0;
  std::size_t failures = 0;
  double center_h = 0.0, center_g = 0.0;
  double upsilon_fail_rate = 0.0, upsilon_stderr = 0.0;
  double recollision_rate = 0.0, recollision_stderr = 0.0;
  double mean_collisions = 0.0;
};

/// Sample covariance over replicas of zeta^t(h) and zeta^0(g), one entry per
/// time in `times` (ascending); all times share the same replicas and flows.
/// Replica i uses make_stream(seed, i); the centering batch uses a separate
/// stream family. Throws std::runtime_error when more than
/// max_failure_fraction of the replicas abort.
std::vector<CovarianceResult> covariance_series(const TestFunction& h, const TestFunction& g,
                                                const std::vector<double>& times,
                                                const CovarianceParams& params);

CovarianceResult covariance_estimate(const TestFunction& h, const TestFunction& g, double t,
                                     const CovarianceParams& params);

/// Unbiased sample covariance of (a_i, b_i) and its delete-one jackknife
/// standard error, in O(n).
std::pair<double, double> covariance_with_jackknife(const std::vector<double>& a,
                                                    const std::vector<double>& b);

}  // namespace hsfluct
