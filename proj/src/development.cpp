#include "hsfluct/development.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hsfluct {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_caps(int m, int n, int kappa_cap) {
  if (m < 0 || n < m) throw std::invalid_argument("develop_phi: need 0 <= m <= n");
  if (n - m > kMaxAnnihilations)
    throw std::invalid_argument("develop_phi: n - m = " + std::to_string(n - m) +
                                " exceeds the enumeration cap " +
                                std::to_string(kMaxAnnihilations));
  if (kappa_cap < 0 || kappa_cap > kMaxKappaCap)
    throw std::invalid_argument("develop_phi: kappa_cap must lie in [0, " +
                                std::to_string(kMaxKappaCap) + "]");
}

// Configuration with the given particle order.
Configuration reorder(const Configuration& c, const std::vector<int>& order) {
  Configuration out;
  out.d = c.d;
  out.epsilon = c.epsilon;
  out.particles.reserve(order.size());
  for (int i : order) out.particles.push_back(c.particles.at(static_cast<std::size_t>(i)));
  return out;
}

// Calls fn on each ordered selection of k items out of pool.
template <class Fn>
void for_each_arrangement(const std::vector<int>& pool, int k, Fn&& fn) {
  std::vector<int> pick;
  std::vector<char> used(pool.size(), 0);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(pick.size()) == k) {
      fn(pick);
      return;
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      used[i] = 1;
      pick.push_back(pool[i]);
      self(self);
      pick.pop_back();
      used[i] = 0;
    }
  };
  rec(rec);
}

}  // namespace

double phi_term(const SurvivorFunctional& h, const Configuration& zn, const PseudoParams& params,
                double t) {
  const PseudoTrace tr = run_pseudo(zn, params, t);
  if (!tr.accepted) return 0.0;
  int sign = 1;
  for (int sb : params.sbar) sign *= sb;
  return sign * h(tr.survivors(params.m));
}

double develop_phi(const SurvivorFunctional& h, int m, const Configuration& zn, double t,
                   int kappa_cap) {
  const int n = static_cast<int>(zn.size());
  check_caps(m, n, kappa_cap);
  const int k = n - m;
  PseudoParams p;
  p.n = n;
  p.m = m;
  p.s.assign(static_cast<std::size_t>(k), 1);
  p.sbar.assign(static_cast<std::size_t>(k), 1);
  p.kappa.assign(static_cast<std::size_t>(n), 0);

  double total = 0.0;
  const unsigned sign_states = 1u << (2 * k);
  for (;;) {
    for (unsigned bits = 0; bits < sign_states; ++bits) {
      for (int i = 0; i < k; ++i) {
        p.s[static_cast<std::size_t>(i)] = (bits >> (2 * i)) & 1u ? -1 : 1;
        p.sbar[static_cast<std::size_t>(i)] = (bits >> (2 * i + 1)) & 1u ? -1 : 1;
      }
      total += phi_term(h, zn, p, t);
    }
    // next budget vector (mixed radix, kappa_cap + 1 per digit)
    int j = 0;
    while (j < n && p.kappa[static_cast<std::size_t>(j)] == kappa_cap) {
      p.kappa[static_cast<std::size_t>(j)] = 0;
      ++j;
    }
    if (j == n) break;
    ++p.kappa[static_cast<std::size_t>(j)];
  }
  return total / factorial(k);
}

double development_sum(const SurvivorFunctional& h, const Configuration& full,
                       const std::vector<int>& roots, double t, int kappa_cap, int max_added) {
  const int total = static_cast<int>(full.size());
  std::vector<char> is_root(static_cast<std::size_t>(total), 0);
  for (int r : roots) {
    if (r < 0 || r >= total) throw std::invalid_argument("development_sum: root out of range");
    if (is_root[static_cast<std::size_t>(r)])
      throw std::invalid_argument("development_sum: repeated root");
    is_root[static_cast<std::size_t>(r)] = 1;
  }
  std::vector<int> pool;
  for (int i = 0; i < total; ++i)
    if (!is_root[static_cast<std::size_t>(i)]) pool.push_back(i);
  const int added = std::min(max_added, static_cast<int>(pool.size()));
  const int m = static_cast<int>(roots.size());
  double sum = 0.0;
  for (int a = 0; a <= added; ++a)
    for_each_arrangement(pool, a, [&](const std::vector<int>& fam) {
      std::vector<int> order = roots;
      order.insert(order.end(), fam.begin(), fam.end());
      sum += develop_phi(h, m, reorder(full, order), t, kappa_cap);
    });
  return sum;
}

double family_sum_direct(const SurvivorFunctional& h, int m, const Configuration& zn, double t,
                         int kappa_cap) {
  const int n = static_cast<int>(zn.size());
  check_caps(m, n, kappa_cap);
  std::vector<int> roots(static_cast<std::size_t>(m));
  std::iota(roots.begin(), roots.end(), 0);
  std::vector<int> pool;
  for (int i = m; i < n; ++i) pool.push_back(i);
  double sum = 0.0;
  for_each_arrangement(pool, n - m, [&](const std::vector<int>& fam) {
    std::vector<int> order = roots;
    order.insert(order.end(), fam.begin(), fam.end());
    sum += develop_phi(h, m, reorder(zn, order), t, kappa_cap);
  });
  return sum;
}

double family_sum_composed(const SurvivorFunctional& h, int m, const Configuration& zn, double t,
                           double t_split, int kappa_cap) {
  const int n = static_cast<int>(zn.size());
  check_caps(m, n, kappa_cap);
  if (!(t_split > 0.0 && t_split < t))
    throw std::invalid_argument("family_sum_composed: need 0 < t_split < t");
  std::vector<int> roots(static_cast<std::size_t>(m));
  std::iota(roots.begin(), roots.end(), 0);
  std::vector<int> pool;
  for (int i = m; i < n; ++i) pool.push_back(i);
  const double rest = t - t_split;
  double sum = 0.0;
  for_each_arrangement(pool, n - m, [&](const std::vector<int>& fam) {
    std::vector<int> order = roots;
    order.insert(order.end(), fam.begin(), fam.end());
    const Configuration z = reorder(zn, order);
    for (int np = m; np <= n; ++np) {
      SurvivorFunctional inner = [&](const std::vector<Particle>& y) {
        Configuration c;
        c.d = zn.d;
        c.epsilon = zn.epsilon;
        c.particles = y;
        return develop_phi(h, m, c, rest, kappa_cap);
      };
      sum += develop_phi(inner, np, z, t_split, kappa_cap);
    }
  });
  return sum;
}

}  // namespace hsfluct
