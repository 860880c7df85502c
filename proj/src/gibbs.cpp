#include "hsfluct/gibbs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hsfluct/parallel.hpp"

namespace hsfluct {

void EnsembleParams::validate() const {
  if (d != 2 && d != 3) throw std::invalid_argument("ensemble: d must be 2 or 3");
  if (!(epsilon > 0.0) || !(epsilon < 0.25))
    throw std::invalid_argument("ensemble: epsilon must lie in (0, 1/4)");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("ensemble: mu must be >= 0");
  if (rejection_cap == 0) throw std::invalid_argument("ensemble: rejection_cap must be positive");
}

double boltzmann_grad_mu(double epsilon, int d) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("boltzmann_grad_mu: epsilon must be > 0");
  return std::pow(epsilon, -(d - 1));
}

EnsembleParams boltzmann_grad_params(double epsilon, int d, std::uint64_t seed) {
  EnsembleParams p;
  p.d = d;
  p.epsilon = epsilon;
  p.mu = boltzmann_grad_mu(epsilon, d);
  p.seed = seed;
  return p;
}

double expected_overlap_pairs(int d, double epsilon, double mu) {
  return 0.5 * mu * mu * unit_ball_volume(d) * std::pow(epsilon, d);
}

Configuration sample_poisson(int d, double epsilon, double mu, Rng& rng) {
  Configuration c;
  c.d = d;
  c.epsilon = epsilon;
  std::poisson_distribution<long> count(mu);
  const long n = mu > 0.0 ? count(rng) : 0;
  c.particles.resize(static_cast<std::size_t>(n));
  for (auto& p : c.particles) {
    p.x = uniform_torus_point(d, rng);
    p.v = maxwellian_sample(d, rng);
  }
  return c;
}

bool has_overlap(const Configuration& c) {
  const double e2 = c.epsilon * c.epsilon;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (norm2(minimum_image(c.particles[i].x, c.particles[j].x)) < e2) return true;
  return false;
}

namespace {

Vec uniform_in_ball(const Vec& center, double radius, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec y(center.d);
  do {
    for (int i = 0; i < center.d; ++i) y[i] = u(rng);
  } while (norm2(y) >= 1.0);
  return wrap(center + radius * y);
}

Configuration wholesale(const EnsembleParams& p, Rng& rng, SamplerStats* stats) {
  for (std::size_t attempt = 1; attempt <= p.rejection_cap; ++attempt) {
    Configuration c = sample_poisson(p.d, p.epsilon, p.mu, rng);
    if (!has_overlap(c)) {
      if (stats) stats->attempts += attempt;
      return c;
    }
  }
  throw std::runtime_error(
      "sample_gibbs: rejection budget of " + std::to_string(p.rejection_cap) +
      " attempts exhausted (estimated acceptance " +
      format_real(std::exp(-expected_overlap_pairs(p.d, p.epsilon, p.mu))) + ")");
}

// Each round removes every point within epsilon of an overlapping point and
// redraws a Poisson process on that union of balls.
Configuration partial_rejection(const EnsembleParams& p, Rng& rng, SamplerStats* stats) {
  Configuration c = sample_poisson(p.d, p.epsilon, p.mu, rng);
  const double e2 = p.epsilon * p.epsilon;
  const double ball_mass = p.mu * unit_ball_volume(p.d) * std::pow(p.epsilon, p.d);
  std::poisson_distribution<long> per_ball(ball_mass);
  std::vector<char> bad;
  for (std::size_t round = 0; round < p.rejection_cap; ++round) {
    const std::size_t n = c.size();
    bad.assign(n, 0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (norm2(minimum_image(c.particles[i].x, c.particles[j].x)) < e2) {
          bad[i] = bad[j] = 1;
          any = true;
        }
    if (!any) {
      if (stats) stats->attempts += round + 1;
      return c;
    }
    std::vector<Vec> centers;
    for (std::size_t i = 0; i < n; ++i)
      if (bad[i]) centers.push_back(c.particles[i].x);
    auto covered = [&](const Vec& y, std::size_t upto) {
      for (std::size_t k = 0; k < upto; ++k)
        if (norm2(minimum_image(y, centers[k])) < e2) return true;
      return false;
    };
    std::vector<Particle> kept;
    kept.reserve(n);
    for (const auto& q : c.particles)
      if (!covered(q.x, centers.size())) kept.push_back(q);
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const long m = per_ball(rng);
      for (long r = 0; r < m; ++r) {
        Vec y = uniform_in_ball(centers[k], p.epsilon, rng);
        Vec v = maxwellian_sample(p.d, rng);
        if (covered(y, k)) continue;
        kept.push_back({y, v});
        if (stats) ++stats->resampled_points;
      }
    }
    c.particles = std::move(kept);
  }
  throw std::runtime_error("sample_gibbs: partial rejection did not terminate within " +
                           std::to_string(p.rejection_cap) + " rounds");
}

}  // namespace

Configuration sample_gibbs(const EnsembleParams& params, Rng& rng, SamplerStats* stats) {
  params.validate();
  if (!params.exclusion) {
    if (stats) ++stats->attempts;
    return sample_poisson(params.d, params.epsilon, params.mu, rng);
  }
  if (params.sampler == SamplerKind::kWholesaleRejection) return wholesale(params, rng, stats);
  return partial_rejection(params, rng, stats);
}

MeanEstimate mean_and_stderr(const std::vector<double>& xs) {
  MeanEstimate m;
  m.count = xs.size();
  if (xs.empty()) return m;
  double s = 0.0;
  for (double x : xs) s += x;
  m.mean = s / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return m;
}

MeanEstimate expectation(const std::function<double(const Configuration&)>& fn,
                         const EnsembleParams& params, std::size_t replicas, unsigned threads) {
  if (replicas < 2) throw std::invalid_argument("expectation: need at least 2 replicas");
  params.validate();
  std::vector<double> values(replicas);
  parallel_for(replicas, threads, [&](std::size_t i) {
    Rng rng = make_stream(params.seed, i);
    values[i] = fn(sample_gibbs(params, rng));
  });
  return mean_and_stderr(values);
}

}  // namespace hsfluct
