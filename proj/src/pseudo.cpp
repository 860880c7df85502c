#include "hsfluct/pseudo.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "hsfluct/flow.hpp"

namespace hsfluct {

void PseudoParams::validate() const {
  if (m < 0 || n < m) throw std::invalid_argument("pseudo: need 0 <= m <= n");
  const auto k = static_cast<std::size_t>(n - m);
  if (s.size() != k || sbar.size() != k || kappa.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("pseudo: parameter lengths inconsistent with (n, m)");
  for (std::size_t i = 0; i < k; ++i)
    if ((s[i] != 1 && s[i] != -1) || (sbar[i] != 1 && sbar[i] != -1))
      throw std::invalid_argument("pseudo: signs must be +1 or -1");
  for (int x : kappa)
    if (x < 0) throw std::invalid_argument("pseudo: budgets must be non-negative");
}

std::vector<Particle> PseudoTrace::survivors(int m) const {
  return {state.begin(), state.begin() + m};
}

namespace {

double live_energy(const std::vector<Particle>& st, const std::vector<char>& alive) {
  double e = 0.0;
  for (std::size_t i = 0; i < st.size(); ++i)
    if (alive[i]) e += 0.5 * norm2(st[i].v);
  return e;
}

}  // namespace

PseudoTrace run_pseudo(const Configuration& zn, const PseudoParams& params, double t,
                       std::size_t max_events) {
  params.validate();
  const int n = params.n;
  if (static_cast<int>(zn.size()) != n)
    throw std::invalid_argument("run_pseudo: configuration size differs from params.n");
  const double eps = zn.epsilon;
  const double inf = std::numeric_limits<double>::infinity();

  PseudoTrace tr;
  tr.state = zn.particles;
  tr.alive.assign(static_cast<std::size_t>(n), 1);
  tr.kappa = params.kappa;
  tr.energy.push_back(live_energy(tr.state, tr.alive));

  // Absolute contact times for each live pair, refreshed when either member
  // changes velocity. Straight-line motion keeps other entries valid.
  std::vector<double> when(static_cast<std::size_t>(n * n), inf);
  double now = 0.0;
  auto at = [&](int i, int j) -> double& { return when[static_cast<std::size_t>(i * n + j)]; };
  auto predict = [&](int i, int j) {
    at(i, j) = inf;
    if (!tr.alive[static_cast<std::size_t>(i)] || !tr.alive[static_cast<std::size_t>(j)]) return;
    auto c = next_pair_collision(tr.state[static_cast<std::size_t>(i)],
                                 tr.state[static_cast<std::size_t>(j)], eps, t - now);
    if (c && c->time > 0.0) at(i, j) = now + c->time;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) predict(i, j);

  std::size_t count = 0;
  for (;;) {
    int bq = -1, bqp = -1;
    double best = inf;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (at(i, j) < best) {
          best = at(i, j);
          bq = i;
          bqp = j;
        }
    if (bq < 0 || best > t) break;
    if (++count > max_events)
      throw std::runtime_error("run_pseudo: more than " + std::to_string(max_events) + " contacts");
    const double dt = best - now;
    for (int i = 0; i < n; ++i)
      if (tr.alive[static_cast<std::size_t>(i)]) {
        auto& p = tr.state[static_cast<std::size_t>(i)];
        p.x = wrap(p.x + dt * p.v);
      }
    now = best;

    auto& pq = tr.state[static_cast<std::size_t>(bq)];
    auto& pqp = tr.state[static_cast<std::size_t>(bqp)];
    Vec r = minimum_image(pqp.x, pq.x);
    const Vec eta = (1.0 / norm(r)) * r;
    const auto [vq, vqp] = scatter(pq.v, pqp.v, eta);
    PseudoEvent ev;
    ev.time = now;
    ev.q = bq;
    ev.qp = bqp;
    std::vector<int> changed;
    if (tr.iota <= n - params.m) {
      const auto idx = static_cast<std::size_t>(tr.iota - 1);
      const int inspect = params.s[idx] == 1 ? bq : bqp;
      int& budget = tr.kappa[static_cast<std::size_t>(inspect)];
      if (budget > 0) {
        --budget;
        pq.v = vq;
        pqp.v = vqp;
        ev.kind = PseudoEventKind::kRecollision;
        changed = {bq, bqp};
      } else {
        const int survivor = inspect == bq ? bqp : bq;
        tr.alive[static_cast<std::size_t>(inspect)] = 0;
        ev.kind = PseudoEventKind::kAnnihilation;
        ev.removed = inspect;
        if (params.sbar[idx] == 1) {
          tr.state[static_cast<std::size_t>(survivor)].v = survivor == bq ? vq : vqp;
          ev.survivor_scattered = true;
        }
        ++tr.iota;
        changed = {survivor};
        for (int k = 0; k < n; ++k) {
          at(std::min(k, inspect), std::max(k, inspect)) = inf;
        }
      }
    } else {
      pq.v = vq;
      pqp.v = vqp;
      ev.kind = PseudoEventKind::kHamiltonian;
      changed = {bq, bqp};
    }
    tr.events.push_back(ev);
    tr.energy.push_back(live_energy(tr.state, tr.alive));
    for (int c : changed)
      for (int k = 0; k < n; ++k)
        if (k != c) predict(std::min(k, c), std::max(k, c));
  }
  const double dt = t - now;
  for (int i = 0; i < n; ++i)
    if (tr.alive[static_cast<std::size_t>(i)]) {
      auto& p = tr.state[static_cast<std::size_t>(i)];
      p.x = wrap(p.x + dt * p.v);
    }

  bool ok = true;
  for (int i = 0; i < n; ++i)
    if ((tr.alive[static_cast<std::size_t>(i)] != 0) != (i < params.m)) ok = false;
  for (int k : tr.kappa)
    if (k != 0) ok = false;
  tr.accepted = ok;
  return tr;
}

CollisionGraph pseudo_collision_graph(const PseudoTrace& trace) {
  CollisionGraph g;
  g.vertices = static_cast<int>(trace.state.size());
  for (const auto& e : trace.events) g.edges.push_back({e.q, e.qp, e.time});
  return g;
}

}  // namespace hsfluct
