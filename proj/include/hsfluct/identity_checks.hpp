// Small-system fixtures for the development theorem and the semigroup
// property of Phi, shared by the CLI and the test suites.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "hsfluct/development.hpp"
#include "hsfluct/gibbs.hpp"

namespace hsfluct {

struct SmallSystem {
  Configuration config;
  double t = 0.0;
  std::size_t collisions = 0;  // hard-sphere collisions on [0, t]
};

/// n particles packed near the torus centre with Maxwellian velocities,
/// resampled until the hard-sphere flow has between min_collisions and
/// max_collisions collisions on [0, t]. Throws std::runtime_error after
/// 100000 attempts.
SmallSystem sample_small_system(int d, int n, double epsilon, double t, int min_collisions,
                                int max_collisions, Rng& rng);

struct IdentityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  /// Largest per-term mismatch when the sides are sums of checked terms.
  double term_error = 0.0;
  /// Terms with a nonzero value on either side.
  int nonzero_terms = 0;
  double error() const;
};

/// lhs: development_sum over families added to `root`; rhs: h of the root
/// particle on the hard-sphere trajectory at t.
IdentityResult check_development_identity(const SmallSystem& sys, int root,
                                          const SurvivorFunctional& h, int kappa_cap);

/// For every sub-system containing particle 0 (placed first) compares
/// family_sum_direct with family_sum_composed split at t_split; lhs and rhs
/// are the totals over sub-systems.
IdentityResult check_semigroup_identity(const SmallSystem& sys, const SurvivorFunctional& h,
                                        double t_split, int kappa_cap);

struct DualityOptions {
  int d = 3;
  double epsilon = 0.05;
  double t = 0.5;
  int sbar = 1;  // does the survivor scatter at the annihilation
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};

using PairObservable = std::function<double(const Particle&, const Particle&)>;
using OneObservable = std::function<double(const Particle&)>;

/// Forward side for two particles and one survivor: mu times the integral
/// over overlap-free Z_2 with Maxwellian velocities of
/// 1{accepted} h(z_1(t)) g2(z_1, z_2), with the partner annihilated at the
/// first contact (s = -1, zero budgets).
MeanEstimate duality_forward(const OneObservable& h, const PairObservable& g2,
                             const DualityOptions& opt);

/// Backward side: integral of h(z_1) g2(xi(0)) over one-creation trees
/// rooted at (z_1, t), restricted to overlap-free trees, with weight
/// M(v_1) ((v_1 - vbar) . eta)_+ M(vbar); mu eps^(d-1) = 1.
MeanEstimate duality_backward(const OneObservable& h, const PairObservable& g2,
                              const DualityOptions& opt);

/// A smooth survivor observable mixing position and velocity of label 0.
double probe_observable(const std::vector<Particle>& survivors);

}  // namespace hsfluct
