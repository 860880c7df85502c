#include "hsfluct/collision_operator.hpp"

#include <cmath>
#include <stdexcept>

namespace hsfluct {

double angular_factor(int d) {
  if (d == 3) return kPi;
  if (d == 2) return 2.0;
  throw std::invalid_argument("angular_factor: d must be 2 or 3");
}

double mean_speed(int d) {
  if (d == 3) return 2.0 * std::sqrt(2.0 / kPi);
  if (d == 2) return std::sqrt(kPi / 2.0);
  throw std::invalid_argument("mean_speed: d must be 2 or 3");
}

double mean_relative_speed(const Vec& v) {
  const double r = norm(v);
  if (v.d == 3) {
    if (r < 1e-6) return 2.0 * std::sqrt(2.0 / kPi) + r * r * std::sqrt(2.0 / kPi) / 3.0;
    return std::sqrt(2.0 / kPi) * std::exp(-0.5 * r * r) +
           (r + 1.0 / r) * std::erf(r / std::sqrt(2.0));
  }
  if (v.d == 2) {
    // Rice distribution mean with unit scale.
    if (r > 30.0) {
      const double r2 = r * r;
      return r + 1.0 / (2.0 * r) + 1.0 / (8.0 * r * r2) + 3.0 / (16.0 * r2 * r2 * r);
    }
    const double x = 0.25 * r * r;
    const double i0 = std::cyl_bessel_i(0.0, x) * std::exp(-x);
    const double i1 = std::cyl_bessel_i(1.0, x) * std::exp(-x);
    return std::sqrt(kPi / 2.0) * ((1.0 + 0.5 * r * r) * i0 + 0.5 * r * r * i1);
  }
  throw std::invalid_argument("mean_relative_speed: d must be 2 or 3");
}

double collision_rate(const Vec& v) { return angular_factor(v.d) * mean_relative_speed(v); }

double collision_rate_bound(double speed, int d) {
  return angular_factor(d) * (speed + mean_speed(d));
}

Vec cosine_weighted_direction(const Vec& w_hat, double u1, double u2) {
  if (w_hat.d == 2) {
    const double s = 2.0 * u1 - 1.0;
    const double c = std::sqrt(std::max(0.0, 1.0 - s * s));
    // rotate (c, s) so that the first axis lies along w_hat
    return Vec{c * w_hat[0] - s * w_hat[1], c * w_hat[1] + s * w_hat[0]};
  }
  const double ct = std::sqrt(u1);
  const double st = std::sqrt(std::max(0.0, 1.0 - u1));
  const double phi = 2.0 * kPi * u2;
  // orthonormal frame (e1, e2, w_hat)
  Vec a = std::abs(w_hat[0]) < 0.9 ? Vec{1.0, 0.0, 0.0} : Vec{0.0, 1.0, 0.0};
  Vec e1 = a - dot(a, w_hat) * w_hat;
  e1 = (1.0 / norm(e1)) * e1;
  Vec e2{w_hat[1] * e1[2] - w_hat[2] * e1[1], w_hat[2] * e1[0] - w_hat[0] * e1[2],
         w_hat[0] * e1[1] - w_hat[1] * e1[0]};
  Vec eta = (st * std::cos(phi)) * e1 + (st * std::sin(phi)) * e2 + ct * w_hat;
  return (1.0 / norm(eta)) * eta;
}

Vec size_biased_maxwellian(int d, Rng& rng) {
  std::normal_distribution<double> n01;
  double r;
  if (d == 3) {
    std::gamma_distribution<double> g(2.0, 1.0);
    r = std::sqrt(2.0 * g(rng));
  } else {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double z = n01(rng);
      s += z * z;
    }
    r = std::sqrt(s);
  }
  return r * uniform_sphere(d, rng);
}

PartnerDraw sample_collision_partner(const Vec& v, Rng& rng) {
  const int d = v.d;
  const double speed = norm(v);
  const double m1 = mean_speed(d);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (;;) {
    const Vec vs = u01(rng) < speed / (speed + m1) ? maxwellian_sample(d, rng)
                                                   : size_biased_maxwellian(d, rng);
    const Vec w = v - vs;
    const double wn = norm(w);
    if (u01(rng) * (speed + norm(vs)) < wn) {
      const double a = u01(rng), b = u01(rng);
      return {vs, cosine_weighted_direction((1.0 / wn) * w, a, b)};
    }
  }
}

OperatorEstimate apply_L(const VelocityFunction& g, const Vec& v, std::size_t samples, Rng& rng) {
  if (samples < 2) throw std::invalid_argument("apply_L: need at least two samples");
  const int d = v.d;
  const double area = sphere_area(d);
  const double gv = g(v);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec vs = maxwellian_sample(d, rng);
    const Vec eta = uniform_sphere(d, rng);
    const double b = dot(v - vs, eta);
    double x = 0.0;
    if (b > 0.0) {
      const auto [vp, vsp] = scatter(v, vs, eta);
      x = area * b * (g(vp) + g(vsp) - gv - g(vs));
    }
    sum += x;
    sum2 += x * x;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace hsfluct
