// The conditionings Upsilon (small distance clusters with bounded cluster
// energy at micro-step times) and chi_r (local recollision clusters).
#pragma once

#include <vector>

#include "hsfluct/core.hpp"
#include "hsfluct/flow.hpp"

namespace hsfluct {

struct ConditioningParams {
  int gamma = 4;
  double delta = 0.0;
  double V = 0.0;
  double L = 0.0;

  /// gamma = 4, delta = eps^(1 - 1/(2d)), V = |log eps|, L = 2 delta V.
  static ConditioningParams defaults(double epsilon, int d);
  void validate() const;
};

struct UpsilonStep {
  double time = 0.0;
  int largest_cluster = 0;
  /// Sum of the gamma largest |v|^2.
  double top_energy = 0.0;
  bool ok = true;
};

/// Evaluates both conditions on one state.
UpsilonStep upsilon_step(const Configuration& c, double time, const ConditioningParams& cond);

struct UpsilonResult {
  bool ok = true;
  std::vector<UpsilonStep> steps;
};

/// Upsilon along the hard-sphere flow at times 0, delta, 2 delta, ... up to
/// t (t itself included). Clusters of size <= gamma pass; every subset of at
/// most gamma particles must satisfy |V_omega|^2 <= V^2. With stop_early
/// the scan ends at the first failing step.
UpsilonResult check_upsilon(const Configuration& config, double t, const ConditioningParams& cond,
                            const FlowOptions& flow = {}, bool stop_early = true);

/// Sample times used by check_upsilon.
std::vector<double> upsilon_times(double t, double delta);

inline constexpr int kMaxChiParticles = 5;

/// chi_r: true iff some pseudotrajectory parameters (m = 1, budgets at most
/// kappa_max; kappa_max < 0 means r - 1) give a connected collision graph on
/// [0, delta] that contains a cycle. Exhaustive; r <= kMaxChiParticles.
bool chi_indicator(const Configuration& config_r, double delta, int kappa_max = -1);

}  // namespace hsfluct
