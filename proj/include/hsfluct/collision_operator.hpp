// The linearized hard-sphere collision operator
//   L g(v) = int int (g(v') + g(v*') - g(v) - g(v*)) ((v - v*) . eta)_+ M(v*) deta dv*.
#pragma once

#include <cstddef>
#include <functional>

#include "hsfluct/core.hpp"

namespace hsfluct {

using VelocityFunction = std::function<double(const Vec&)>;

/// int_{S^{d-1}} (w . eta)_+ deta = c_d |w|: pi in 3-D, 2 in 2-D.
double angular_factor(int d);

/// E|V| for V standard normal in R^d.
double mean_speed(int d);

/// E|v - V| for V standard normal in R^d, closed form.
double mean_relative_speed(const Vec& v);

/// nu(v) = c_d E|v - V|.
double collision_rate(const Vec& v);

/// Dominating rate c_d (speed + E|V|) used for thinning; nu(v) <= bound
/// whenever |v| <= speed.
double collision_rate_bound(double speed, int d);

/// Direction with density proportional to (w_hat . eta)_+ on the sphere.
Vec cosine_weighted_direction(const Vec& w_hat, double u1, double u2);

struct PartnerDraw {
  Vec v_star;
  Vec eta;
};

/// Size-biased Maxwellian: density |v| M(v) / E|V|.
Vec size_biased_maxwellian(int d, Rng& rng);

/// Exact draw from the normalised kernel ((v - v*) . eta)_+ M(v*) / nu(v).
PartnerDraw sample_collision_partner(const Vec& v, Rng& rng);

/// Monte Carlo value of L g(v): v* ~ M, eta uniform, weight |S| (w . eta)_+.
struct OperatorEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};
OperatorEstimate apply_L(const VelocityFunction& g, const Vec& v, std::size_t samples, Rng& rng);

}  // namespace hsfluct
