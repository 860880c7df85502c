#include "hsfluct/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "hsfluct/graph.hpp"
#include "hsfluct/pseudo.hpp"

namespace hsfluct {

ConditioningParams ConditioningParams::defaults(double epsilon, int d) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("conditioning defaults need 0 < epsilon < 1");
  ConditioningParams p;
  p.gamma = 4;
  p.delta = std::pow(epsilon, 1.0 - 1.0 / (2.0 * d));
  p.V = std::abs(std::log(epsilon));
  p.L = 2.0 * p.delta * p.V;
  return p;
}

void ConditioningParams::validate() const {
  if (gamma < 2) throw std::invalid_argument("conditioning: gamma must be at least 2");
  if (!(delta > 0.0)) throw std::invalid_argument("conditioning: delta must be positive");
  if (!(V > 0.0)) throw std::invalid_argument("conditioning: V must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("conditioning: L must be positive");
}

UpsilonStep upsilon_step(const Configuration& c, double time, const ConditioningParams& cond) {
  UpsilonStep s;
  s.time = time;
  if (c.size() == 0) return s;
  for (const auto& cl : distance_clusters(c, cond.L))
    s.largest_cluster = std::max(s.largest_cluster, static_cast<int>(cl.size()));
  std::vector<double> e;
  e.reserve(c.size());
  for (const auto& p : c.particles) e.push_back(norm2(p.v));
  const auto k = std::min(e.size(), static_cast<std::size_t>(cond.gamma));
  std::partial_sort(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(k), e.end(),
                    std::greater<>());
  for (std::size_t i = 0; i < k; ++i) s.top_energy += e[i];
  s.ok = s.largest_cluster <= cond.gamma && s.top_energy <= cond.V * cond.V;
  return s;
}

std::vector<double> upsilon_times(double t, double delta) {
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double tk = static_cast<double>(k) * delta;
    if (tk > t * (1.0 + 1e-12)) break;
    out.push_back(std::min(tk, t));
  }
  if (out.back() < t) out.push_back(t);
  return out;
}

UpsilonResult check_upsilon(const Configuration& config, double t, const ConditioningParams& cond,
                            const FlowOptions& flow, bool stop_early) {
  cond.validate();
  if (t < 0.0) throw std::invalid_argument("check_upsilon: t must be non-negative");
  UpsilonResult r;
  if (config.size() == 0) return r;
  FlowOptions opts = flow;
  opts.record_log = false;
  HardSphereFlow f(config, opts);
  for (double tk : upsilon_times(t, cond.delta)) {
    f.advance_to(tk);
    r.steps.push_back(upsilon_step(f.state(), tk, cond));
    if (!r.steps.back().ok) {
      r.ok = false;
      if (stop_early) break;
    }
  }
  return r;
}

bool chi_indicator(const Configuration& config_r, double delta, int kappa_max) {
  const int r = static_cast<int>(config_r.size());
  if (r > kMaxChiParticles)
    throw std::invalid_argument("chi_indicator: r = " + std::to_string(r) +
                                " exceeds the enumeration cap " +
                                std::to_string(kMaxChiParticles));
  if (!(delta > 0.0)) throw std::invalid_argument("chi_indicator: delta must be positive");
  if (r < 2) return false;
  if (kappa_max < 0) kappa_max = r - 1;
  PseudoParams p;
  p.n = r;
  p.m = 1;
  const int k = r - 1;
  p.s.assign(static_cast<std::size_t>(k), 1);
  p.sbar.assign(static_cast<std::size_t>(k), 1);
  p.kappa.assign(static_cast<std::size_t>(r), 0);
  const unsigned sign_states = 1u << (2 * k);
  for (;;) {
    for (unsigned bits = 0; bits < sign_states; ++bits) {
      for (int i = 0; i < k; ++i) {
        p.s[static_cast<std::size_t>(i)] = (bits >> (2 * i)) & 1u ? -1 : 1;
        p.sbar[static_cast<std::size_t>(i)] = (bits >> (2 * i + 1)) & 1u ? -1 : 1;
      }
      const PseudoTrace tr = run_pseudo(config_r, p, delta);
      const CollisionGraph g = pseudo_collision_graph(tr);
      if (is_connected(g) && first_cycle_event(g)) return true;
    }
    int j = 0;
    while (j < r && p.kappa[static_cast<std::size_t>(j)] == kappa_max) {
      p.kappa[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == r) break;
    ++p.kappa[static_cast<std::size_t>(j)];
  }
  return false;
}

}  // namespace hsfluct
