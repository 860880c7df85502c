// Grand-canonical hard-sphere Gibbs measure on the unit torus.
#pragma once

#include <cstdint>
#include <functional>

#include "hsfluct/core.hpp"

namespace hsfluct {

enum class SamplerKind {
  /// Exact partial rejection sampling: only the neighbourhood of the
  /// overlapping points is redrawn each round.
  kPartialRejection,
  /// Redraw the whole Poisson configuration until no pair overlaps.
  kWholesaleRejection,
};

struct EnsembleParams {
  int d = 3;
  double epsilon = 0.1;
  double mu = 100.0;
  std::uint64_t seed = 0;
  std::size_t replicas = 1;
  /// false samples the free Poisson gas (the epsilon -> 0 reference).
  bool exclusion = true;
  SamplerKind sampler = SamplerKind::kPartialRejection;
  /// Maximum wholesale attempts, or partial-rejection rounds.
  std::size_t rejection_cap = 100000;

  void validate() const;
};

double boltzmann_grad_mu(double epsilon, int d);

/// Parameters on the Boltzmann-Grad line mu * epsilon^(d-1) = 1.
EnsembleParams boltzmann_grad_params(double epsilon, int d, std::uint64_t seed);

struct SamplerStats {
  std::size_t attempts = 0;  // wholesale draws, or resampling rounds
  std::size_t resampled_points = 0;
};

/// Draws from (mu^n / n!) 1{no overlap} M^{(x)n} dZ_n. Throws
/// std::runtime_error when the rejection budget is exhausted.
Configuration sample_gibbs(const EnsembleParams& params, Rng& rng, SamplerStats* stats = nullptr);

/// Poisson(mu) points, uniform positions, Maxwellian velocities, no exclusion.
Configuration sample_poisson(int d, double epsilon, double mu, Rng& rng);

bool has_overlap(const Configuration& c);

/// Expected number of overlapping pairs in a Poisson(mu) configuration.
double expected_overlap_pairs(int d, double epsilon, double mu);

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

MeanEstimate mean_and_stderr(const std::vector<double>& xs);

/// Replica average of fn over independent draws; replica i uses stream
/// make_stream(params.seed, i).
MeanEstimate expectation(const std::function<double(const Configuration&)>& fn,
                         const EnsembleParams& params, std::size_t replicas, unsigned threads = 0);

}  // namespace hsfluct
