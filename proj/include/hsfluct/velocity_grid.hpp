// Quadrature rules for L^2(M(v) dv).
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hsfluct/core.hpp"

namespace hsfluct {

/// Gauss-Hermite rule for the standard normal weight (probabilists'
/// convention, weights sum to 1), computed by Golub-Welsch.
void gauss_hermite_1d(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct VelocityGrid {
  int d = 3;
  std::vector<Vec> nodes;
  std::vector<double> weights;

  /// Tensor product of the n-point rule.
  static VelocityGrid gauss_hermite(int d, int n_per_axis = 24);
  /// n Maxwellian samples with equal weights.
  static VelocityGrid monte_carlo(int d, std::size_t n, std::uint64_t seed);

  double integrate(const std::function<double(const Vec&)>& f) const;
  std::size_t size() const { return nodes.size(); }
};

}  // namespace hsfluct
