#include "hsfluct/core.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hsfluct {

Vec::Vec(std::initializer_list<double> xs) : d(static_cast<int>(xs.size())) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("Vec: dimension must be 1..3");
  int i = 0;
  for (double x : xs) c[static_cast<std::size_t>(i++)] = x;
}

Vec wrap(Vec x) {
  for (int i = 0; i < x.d; ++i) {
    double y = x[i] - std::floor(x[i]);
    if (y >= 1.0) y = 0.0;  // x slightly negative rounds up to exactly 1
    x[i] = y;
  }
  return x;
}

Vec minimum_image(const Vec& x1, const Vec& x2) {
  Vec r = x1 - x2;
  for (int i = 0; i < r.d; ++i) r[i] -= std::ceil(r[i] - 0.5);
  return r;
}

double torus_distance(const Vec& x1, const Vec& x2) { return norm(minimum_image(x1, x2)); }

double maxwellian_density(const Vec& v) {
  return std::pow(2.0 * kPi, -0.5 * v.d) * std::exp(-0.5 * norm2(v));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a combination of the two words
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(mix_seed(seed, index))};
  return Rng(seq);
}

Vec maxwellian_sample(int d, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = n01(rng);
  return v;
}

Vec uniform_torus_point(int d, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec x(d);
  for (int i = 0; i < d; ++i) x[i] = u(rng);
  return x;
}

Vec uniform_sphere(int d, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  for (;;) {
    Vec e(d);
    for (int i = 0; i < d; ++i) e[i] = n01(rng);
    const double r = norm(e);
    if (r > 1e-12) return (1.0 / r) * e;
  }
}

double sphere_area(int d) { return d == 2 ? 2.0 * kPi : 4.0 * kPi; }

double unit_ball_volume(int d) { return d == 2 ? kPi : 4.0 * kPi / 3.0; }

std::pair<Vec, Vec> scatter(const Vec& v, const Vec& v_star, const Vec& eta) {
  if (std::abs(norm(eta) - 1.0) > 1e-12)
    throw std::invalid_argument("scatter: contact normal is not a unit vector");
  const double k = dot(eta, v - v_star);
  return {v - k * eta, v_star + k * eta};
}

double kinetic_energy(const Configuration& c) {
  double e = 0.0;
  for (const auto& p : c.particles) e += 0.5 * norm2(p.v);
  return e;
}

Vec total_momentum(const Configuration& c) {
  Vec m(c.d);
  for (const auto& p : c.particles) m += p.v;
  return m;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_configuration(std::ostream& os, const Configuration& c) {
  os << c.d << ' ' << format_real(c.epsilon) << ' ' << c.particles.size() << '\n';
  for (const auto& p : c.particles) {
    for (int i = 0; i < c.d; ++i) os << format_real(p.x[i]) << ' ';
    for (int i = 0; i < c.d; ++i) os << format_real(p.v[i]) << (i + 1 < c.d ? ' ' : '\n');
  }
}

Configuration read_configuration(std::istream& is) {
  Configuration c;
  std::size_t n = 0;
  if (!(is >> c.d >> c.epsilon >> n)) throw std::runtime_error("configuration: bad header");
  if (c.d != 2 && c.d != 3) throw std::runtime_error("configuration: d must be 2 or 3");
  c.particles.resize(n);
  for (auto& p : c.particles) {
    p.x = Vec(c.d);
    p.v = Vec(c.d);
    for (int i = 0; i < c.d; ++i) is >> p.x[i];
    for (int i = 0; i < c.d; ++i) is >> p.v[i];
    if (!is) throw std::runtime_error("configuration: truncated particle list");
  }
  return c;
}

}  // namespace hsfluct
