#include "hsfluct/identity_checks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hsfluct/backward.hpp"
#include "hsfluct/flow.hpp"
#include "hsfluct/pseudo.hpp"

namespace hsfluct {

double IdentityResult::error() const { return std::max(std::abs(lhs - rhs), term_error); }

SmallSystem sample_small_system(int d, int n, double epsilon, double t, int min_collisions,
                                int max_collisions, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_small_system: need at least one particle");
  if (min_collisions < 1 || max_collisions < min_collisions)
    throw std::invalid_argument("sample_small_system: need 1 <= min_collisions <= max_collisions");
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // box wide enough that a few contacts happen within t at unit speeds
  const double half = epsilon + 0.25 * t;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Configuration c;
    c.d = d;
    c.epsilon = epsilon;
    bool overlap = false;
    for (int i = 0; i < n && !overlap; ++i) {
      Particle p;
      p.x = Vec(d);
      for (int k = 0; k < d; ++k) p.x[k] = 0.5 + half * u(rng);
      p.v = maxwellian_sample(d, rng);
      for (const auto& q : c.particles)
        if (torus_distance(p.x, q.x) <= epsilon) overlap = true;
      c.particles.push_back(p);
    }
    if (overlap) continue;
    FlowOptions fo;
    fo.max_events = 1000;
    FlowResult r;
    try {
      r = run_flow(c, t, fo);
    } catch (const FlowError&) {
      continue;
    }
    const std::size_t k = r.log.events.size();
    if (k >= static_cast<std::size_t>(min_collisions) && k <= static_cast<std::size_t>(max_collisions)) return {c, t, k};
  }
  throw std::runtime_error("sample_small_system: no admissible system found");
}

IdentityResult check_development_identity(const SmallSystem& sys, int root,
                                          const SurvivorFunctional& h, int kappa_cap) {
  IdentityResult r;
  const int n = static_cast<int>(sys.config.size());
  r.lhs = development_sum(h, sys.config, {root}, sys.t, kappa_cap,
                          std::min(n - 1, kMaxAnnihilations));
  const FlowResult fr = run_flow(sys.config, sys.t);
  r.rhs = h({fr.state.particles[static_cast<std::size_t>(root)]});
  return r;
}

IdentityResult check_semigroup_identity(const SmallSystem& sys, const SurvivorFunctional& h,
                                        double t_split, int kappa_cap) {
  IdentityResult r;
  const int n = static_cast<int>(sys.config.size());
  if (n < 1) return r;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    Configuration sub = sys.config;
    sub.particles.clear();
    sub.particles.push_back(sys.config.particles[0]);
    for (int i = 1; i < n; ++i)
      if (mask & (1u << (i - 1))) sub.particles.push_back(sys.config.particles[static_cast<std::size_t>(i)]);
    const double a = family_sum_direct(h, 1, sub, sys.t, kappa_cap);
    const double b = family_sum_composed(h, 1, sub, sys.t, t_split, kappa_cap);
    r.lhs += a;
    r.rhs += b;
    r.term_error = std::max(r.term_error, std::abs(a - b));
    if (a != 0.0 || b != 0.0) ++r.nonzero_terms;
  }
  return r;
}

double probe_observable(const std::vector<Particle>& survivors) {
  const Particle& p = survivors.at(0);
  return std::cos(2.0 * kPi * p.x[0]) + 0.7 * std::sin(2.0 * kPi * p.x[1]) + p.v[0] +
         0.3 * dot(p.v, p.v) - 0.2 * p.v[1] * p.v[p.v.d - 1];
}

namespace {

void check_duality_options(const DualityOptions& opt) {
  if (opt.d != 2 && opt.d != 3) throw std::invalid_argument("duality: d must be 2 or 3");
  if (!(opt.epsilon > 0.0 && opt.epsilon < 0.25))
    throw std::invalid_argument("duality: epsilon must lie in (0, 1/4)");
  if (!(opt.t > 0.0)) throw std::invalid_argument("duality: t must be positive");
  if (opt.sbar != 1 && opt.sbar != -1) throw std::invalid_argument("duality: sbar must be +-1");
  if (opt.samples < 2) throw std::invalid_argument("duality: need at least 2 samples");
}

}  // namespace

MeanEstimate duality_forward(const OneObservable& h, const PairObservable& g2,
                             const DualityOptions& opt) {
  check_duality_options(opt);
  const int d = opt.d;
  const double eps = opt.epsilon;
  const double mu = std::pow(eps, -(d - 1));
  PseudoParams p;
  p.n = 2;
  p.m = 1;
  p.s = {-1};
  p.sbar = {opt.sbar};
  p.kappa = {0, 0};
  Rng rng(mix_seed(opt.seed, 0x6677));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> vals(opt.samples, 0.0);
  for (std::size_t i = 0; i < opt.samples; ++i) {
    Configuration c;
    c.d = d;
    c.epsilon = eps;
    Particle a{uniform_torus_point(d, rng), maxwellian_sample(d, rng)};
    Particle b;
    b.v = maxwellian_sample(d, rng);
    // no contact on [0, t] unless the sup-distance is below eps + t|v_a - v_b|,
    // so x_b is drawn from that cube around x_a and reweighted by its volume
    const double half = std::min(0.5, eps + opt.t * norm(a.v - b.v) + 1e-9);
    b.x = Vec(d);
    for (int k = 0; k < d; ++k) b.x[k] = a.x[k] + half * u(rng);
    b.x = wrap(b.x);
    if (torus_distance(a.x, b.x) <= eps) continue;
    c.particles = {a, b};
    const PseudoTrace tr = run_pseudo(c, p, opt.t);
    if (!tr.accepted) continue;
    vals[i] = mu * std::pow(2.0 * half, d) * h(tr.state[0]) * g2(a, b);
  }
  return mean_and_stderr(vals);
}

MeanEstimate duality_backward(const OneObservable& h, const PairObservable& g2,
                              const DualityOptions& opt) {
  check_duality_options(opt);
  const int d = opt.d;
  Rng rng(mix_seed(opt.seed, 0x6688));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double area = sphere_area(d);
  std::vector<double> vals(opt.samples, 0.0);
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const Particle z1{uniform_torus_point(d, rng), maxwellian_sample(d, rng)};
    Creation cr;
    cr.parent = 0;
    cr.deflect = opt.sbar;
    cr.time = opt.t * u01(rng);
    cr.vbar = maxwellian_sample(d, rng);
    cr.eta = uniform_sphere(d, rng);
    const double cross = dot(z1.v - cr.vbar, cr.eta);
    if (!(cross > 0.0) || !(cr.time > 0.0)) continue;
    CollisionTree tree;
    tree.creations.push_back(cr);
    if (!overlap_free(z1, tree, opt.epsilon, opt.t)) continue;
    const auto xi = backward_characteristic(z1, tree, opt.epsilon, opt.t);
    vals[i] = opt.t * area * cross * h(z1) * g2(xi[0], xi[1]);
  }
  return mean_and_stderr(vals);
}

}  // namespace hsfluct
