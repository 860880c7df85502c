#include "hsfluct/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "hsfluct/gibbs.hpp"

namespace hsfluct {

std::optional<Contact> next_pair_collision(const Particle& p1, const Particle& p2, double epsilon,
                                           double horizon) {
  const int d = p1.x.d;
  const Vec r0 = minimum_image(p1.x, p2.x);
  const Vec u = p1.v - p2.v;
  const double a = norm2(u);
  if (a == 0.0 || !(horizon >= 0.0)) return std::nullopt;
  const double reach = epsilon + std::sqrt(a) * horizon;
  if (norm2(r0) > reach * reach) return std::nullopt;  // the nearest image is closest

  std::array<int, kMaxDim> lo{}, hi{}, k{};
  for (int c = 0; c < d; ++c) {
    lo[c] = static_cast<int>(std::ceil(-reach - r0[c]));
    hi[c] = static_cast<int>(std::floor(reach - r0[c]));
    k[c] = lo[c];
  }
  std::optional<Contact> best;
  const double e2 = epsilon * epsilon;
  for (;;) {
    Vec r = r0;
    for (int c = 0; c < d; ++c) r[c] += k[c];
    const double b = dot(r, u);
    if (b < 0.0) {
      const double cc = norm2(r) - e2;
      const double disc = b * b - a * cc;
      if (disc > 0.0) {
        double tau = cc / (-b + std::sqrt(disc));
        if (tau < 0.0) tau = 0.0;
        if (tau <= horizon && (!best || tau < best->time)) {
          const Vec at = r + tau * u;
          best = Contact{tau, (-1.0 / norm(at)) * at};
        }
      }
    }
    int c = 0;
    while (c < d && ++k[c] > hi[c]) {
      k[c] = lo[c];
      ++c;
    }
    if (c == d) break;
  }
  return best;
}

Particle free_flight(const Particle& p, double t) { return {wrap(p.x + t * p.v), p.v}; }

void write_event_log_csv(std::ostream& os, const EventLog& log, int d) {
  os << "time,i,j";
  for (int k = 1; k <= d; ++k) os << ",eta_" << k;
  for (const char* name : {"v_i_pre", "v_j_pre", "v_i_post", "v_j_post"})
    for (int k = 1; k <= d; ++k) os << ',' << name << '_' << k;
  os << '\n';
  for (const auto& e : log.events) {
    os << format_real(e.time) << ',' << e.i << ',' << e.j;
    for (const Vec* w : {&e.eta, &e.vi_pre, &e.vj_pre, &e.vi_post, &e.vj_post})
      for (int k = 0; k < d; ++k) os << ',' << format_real((*w)[k]);
    os << '\n';
  }
}

HardSphereFlow::HardSphereFlow(Configuration initial, FlowOptions options)
    : state_(std::move(initial)), options_(options) {
  if (has_overlap(state_))
    throw std::invalid_argument("run_flow: initial configuration has overlapping spheres");
  counts_.assign(state_.size(), 0);
  schedule_all();
}

bool HardSphereFlow::valid(const Pending& p) const {
  if (p.i < 0) return true;
  return counts_[static_cast<std::size_t>(p.i)] == p.ci &&
         counts_[static_cast<std::size_t>(p.j)] == p.cj;
}

void HardSphereFlow::drift_to(double t) {
  const double dt = t - now_;
  if (dt != 0.0)
    for (auto& p : state_.particles) p.x = wrap(p.x + dt * p.v);
  now_ = t;
}

void HardSphereFlow::predict_pair(int i, int j, bool after_collision) {
  const auto& pi = state_.particles[static_cast<std::size_t>(i)];
  const auto& pj = state_.particles[static_cast<std::size_t>(j)];
  const auto contact = next_pair_collision(pi, pj, state_.epsilon, next_refresh_ - now_);
  if (!contact) return;
  if (after_collision && contact->time < 1e-12)
    throw FlowError("run_flow: triple contact at t=" + format_real(now_) + " (seed " +
                    std::to_string(options_.seed) + ")");
  queue_.push({now_ + contact->time, i, j, counts_[static_cast<std::size_t>(i)],
               counts_[static_cast<std::size_t>(j)]});
}

void HardSphereFlow::schedule_all() {
  queue_ = {};
  double vmax = 0.0;
  for (const auto& p : state_.particles) vmax = std::max(vmax, norm(p.v));
  // Within this horizon a pair's displacement moves by at most one cell,
  // which keeps the image enumeration in next_pair_collision short.
  next_refresh_ = now_ + (vmax > 0.0 ? 0.5 / vmax : 1.0);
  const int n = static_cast<int>(state_.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) predict_pair(i, j, false);
  queue_.push({next_refresh_, -1, -1, 0, 0});
}

void HardSphereFlow::collide(int i, int j) {
  auto& pi = state_.particles[static_cast<std::size_t>(i)];
  auto& pj = state_.particles[static_cast<std::size_t>(j)];
  Vec r = minimum_image(pj.x, pi.x);
  const Vec eta = (1.0 / norm(r)) * r;
  const auto [vi, vj] = scatter(pi.v, pj.v, eta);
  if (options_.record_log) log_.events.push_back({now_, i, j, eta, pi.v, pj.v, vi, vj});
  pi.v = vi;
  pj.v = vj;
  ++counts_[static_cast<std::size_t>(i)];
  ++counts_[static_cast<std::size_t>(j)];
  if (++events_ > options_.max_events)
    throw FlowError("run_flow: more than " + std::to_string(options_.max_events) +
                    " collisions (seed " + std::to_string(options_.seed) + ")");
  if (now_ - last_collision_ < 1e-12) ++degenerate_;
  last_collision_ = now_;
  predict_pair(i, j, false);  // re-encounter through the periodic boundary
  const int n = static_cast<int>(state_.size());
  for (int k = 0; k < n; ++k) {
    if (k != i && k != j) {
      predict_pair(std::min(i, k), std::max(i, k), true);
      predict_pair(std::min(j, k), std::max(j, k), true);
    }
  }
}

void HardSphereFlow::advance_to(double t) {
  if (t < now_) throw std::invalid_argument("run_flow: cannot advance backwards in time");
  for (;;) {
    while (!queue_.empty() && !valid(queue_.top())) queue_.pop();
    if (queue_.empty() || queue_.top().time > t) break;
    const Pending ev = queue_.top();
    queue_.pop();
    drift_to(ev.time);
    if (ev.i < 0)
      schedule_all();
    else
      collide(ev.i, ev.j);
  }
  drift_to(t);
  log_.horizon = t;
}

FlowResult run_flow(const Configuration& initial, double t, const FlowOptions& options) {
  HardSphereFlow flow(initial, options);
  flow.advance_to(t);
  return {flow.state(), flow.log(), flow.degenerate_events()};
}

}  // namespace hsfluct
