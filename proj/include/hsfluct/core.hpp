// Torus geometry, Maxwellian reference measure and hard-sphere scattering.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace hsfluct {

inline constexpr int kMaxDim = 3;
inline constexpr double kPi = 3.14159265358979323846;

/// Point or vector in R^d with d in {2,3} chosen at runtime.
struct Vec {
  std::array<double, kMaxDim> c{};
  int d = 3;

  Vec() = default;
  explicit Vec(int dim) : d(dim) {}
  Vec(std::initializer_list<double> xs);

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
};

inline Vec operator+(Vec a, const Vec& b) {
  for (int i = 0; i < a.d; ++i) a[i] += b[i];
  return a;
}
inline Vec operator-(Vec a, const Vec& b) {
  for (int i = 0; i < a.d; ++i) a[i] -= b[i];
  return a;
}
inline Vec operator-(Vec a) {
  for (int i = 0; i < a.d; ++i) a[i] = -a[i];
  return a;
}
inline Vec operator*(double s, Vec a) {
  for (int i = 0; i < a.d; ++i) a[i] *= s;
  return a;
}
inline Vec& operator+=(Vec& a, const Vec& b) {
  for (int i = 0; i < a.d; ++i) a[i] += b[i];
  return a;
}
inline Vec& operator-=(Vec& a, const Vec& b) {
  for (int i = 0; i < a.d; ++i) a[i] -= b[i];
  return a;
}
inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.d; ++i) s += a[i] * b[i];
  return s;
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline bool operator==(const Vec& a, const Vec& b) {
  if (a.d != b.d) return false;
  for (int i = 0; i < a.d; ++i)
    if (a[i] != b[i]) return false;
  return true;
}

struct Particle {
  Vec x;  // torus point, coordinates in [0,1)
  Vec v;
};

/// A state Z_n: particles of diameter epsilon on the unit torus.
struct Configuration {
  int d = 3;
  double epsilon = 0.0;
  std::vector<Particle> particles;

  std::size_t size() const { return particles.size(); }
};

// ---------------------------------------------------------------- torus

/// Reduces each coordinate modulo 1 into [0,1).
Vec wrap(Vec x);

/// Shortest displacement x1 - x2 on the torus; components in (-1/2, 1/2].
Vec minimum_image(const Vec& x1, const Vec& x2);

double torus_distance(const Vec& x1, const Vec& x2);

// ----------------------------------------------------------- Maxwellian

double maxwellian_density(const Vec& v);

using Rng = std::mt19937_64;

/// Independent stream for replica `index` of an experiment seeded by `seed`.
Rng make_stream(std::uint64_t seed, std::uint64_t index);
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

Vec maxwellian_sample(int d, Rng& rng);
Vec uniform_torus_point(int d, Rng& rng);
Vec uniform_sphere(int d, Rng& rng);

/// Surface measure of the unit sphere S^{d-1}.
double sphere_area(int d);
/// Volume of the unit ball in R^d.
double unit_ball_volume(int d);

// ------------------------------------------------------------ scattering

/// Elastic collision with contact normal eta. Throws std::invalid_argument
/// when |eta| differs from 1 by more than 1e-12.
std::pair<Vec, Vec> scatter(const Vec& v, const Vec& v_star, const Vec& eta);

double kinetic_energy(const Configuration& c);
Vec total_momentum(const Configuration& c);

// ------------------------------------------------------------------- I/O

/// Header "d epsilon n", then "x1 .. xd v1 .. vd" per particle, 17 digits.
void write_configuration(std::ostream& os, const Configuration& c);
Configuration read_configuration(std::istream& is);

/// "%.17g" formatting used by every text output.
std::string format_real(double x);

}  // namespace hsfluct
