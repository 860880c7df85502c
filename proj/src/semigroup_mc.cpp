#include "hsfluct/semigroup_mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hsfluct/collision_operator.hpp"
#include "hsfluct/parallel.hpp"
#include "json.hpp"

namespace hsfluct {

std::string SemigroupEstimate::to_json() const {
  nlohmann::ordered_json j;
  j["value"] = value;
  j["stderr"] = stderr_;
  j["samples"] = samples;
  j["n_max"] = n_max;
  j["bias_bound"] = bias_bound;
  j["seed"] = seed;
  return j.dump();
}

namespace {

constexpr std::size_t kHistBins = 64;

struct Node {
  Vec xa, a, xb, b;
  double tau = 0.0;
  int sign = 1;
  int depth = 0;
  bool pair = false;
};

struct SampleOut {
  double score = 0.0;
  std::size_t events = 0;
  std::size_t nodes = 0;
  double branch_time = 0.0;
};

class Brancher {
 public:
  Brancher(const TestFunction& g, const SemigroupOptions& o, Rng& rng)
      : g_(g), o_(o), rng_(rng), track_x_(!g.velocity_only()), d_(g.d), m1_(mean_speed(g.d)) {}

  SampleOut run(const Vec& x, const Vec& v) {
    SampleOut out;
    stack_.clear();
    Node root;
    root.xa = x;
    root.a = v;
    root.tau = o_.t;
    stack_.push_back(root);
    while (!stack_.empty()) {
      Node n = stack_.back();
      stack_.pop_back();
      if (++out.nodes > o_.node_cap)
        throw std::runtime_error("semigroup_mc: more than " + std::to_string(o_.node_cap) +
                                 " branches in one sample (seed " + std::to_string(o_.seed) + ")");
      out.branch_time += n.tau;
      if (n.pair)
        out.score += run_pair(n, out);
      else
        out.score += run_single(n, out);
    }
    if (!std::isfinite(out.score))
      throw std::runtime_error("semigroup_mc: nonfinite score (seed " + std::to_string(o_.seed) +
                               ")");
    return out;
  }

 private:
  double leaf(const Vec& x, const Vec& v, double tau) const {
    return track_x_ ? g_(x - tau * v, v) : g_.velocity(v);
  }

  void move(Vec& x, const Vec& v, double s) const {
    if (track_x_) x = wrap(x - s * v);
  }

  Vec propose(double speed) {
    return u01_(rng_) < speed / (speed + m1_) ? maxwellian_sample(d_, rng_)
                                              : size_biased_maxwellian(d_, rng_);
  }

  void push_pair(const Vec& xa, const Vec& a, const Vec& xb, const Vec& b, double tau, int sign,
                 int depth) {
    if (a == b && (!track_x_ || xa == xb)) return;  // identically zero
    Node n;
    n.pair = true;
    n.xa = xa;
    n.a = a;
    n.xb = xb;
    n.b = b;
    n.tau = tau;
    n.sign = sign;
    n.depth = depth;
    if (o_.couple_pairs) {
      stack_.push_back(n);
    } else {
      Node s1 = n, s2 = n;
      s1.pair = s2.pair = false;
      s2.xa = xb;
      s2.a = b;
      s2.sign = -sign;
      stack_.push_back(s1);
      stack_.push_back(s2);
    }
  }

  double run_single(Node n, SampleOut& out) {
    for (;;) {
      const double speed = norm(n.a);
      const double rate = collision_rate_bound(speed, d_);
      const double s = std::exponential_distribution<double>(rate)(rng_);
      if (s >= n.tau || n.depth >= o_.n_max) return n.sign * leaf(n.xa, n.a, n.tau);
      n.tau -= s;
      move(n.xa, n.a, s);
      const Vec vs = propose(speed);
      const Vec w = n.a - vs;
      const double wn = norm(w);
      if (!(u01_(rng_) * (speed + norm(vs)) < wn)) continue;
      const double e1 = u01_(rng_), e2 = u01_(rng_);
      const Vec eta = cosine_weighted_direction((1.0 / wn) * w, e1, e2);
      const auto [vp, vsp] = scatter(n.a, vs, eta);
      ++out.events;
      ++n.depth;
      if (!o_.tagged_only) push_pair(n.xa, vsp, n.xa, vs, n.tau, n.sign, n.depth);
      n.a = vp;
    }
  }

  double run_pair(Node n, SampleOut& out) {
    for (;;) {
      const double na = norm(n.a), nb = norm(n.b);
      const double speed = std::max(na, nb);
      const double rate = collision_rate_bound(speed, d_);
      const double s = std::exponential_distribution<double>(rate)(rng_);
      if (s >= n.tau || n.depth >= o_.n_max)
        return n.sign * (leaf(n.xa, n.a, n.tau) - leaf(n.xb, n.b, n.tau));
      n.tau -= s;
      move(n.xa, n.a, s);
      move(n.xb, n.b, s);
      const Vec vs = propose(speed);
      const double u = u01_(rng_) * (speed + norm(vs));
      const Vec wa = n.a - vs, wb = n.b - vs;
      const double wan = norm(wa), wbn = norm(wb);
      const bool acc_a = u < wan, acc_b = u < wbn;
      if (!acc_a && !acc_b) continue;
      const double e1 = u01_(rng_), e2 = u01_(rng_);
      ++out.events;
      ++n.depth;
      if (acc_a && acc_b) {
        const auto [ap, asp] = scatter(n.a, vs, cosine_weighted_direction((1.0 / wan) * wa, e1, e2));
        const auto [bp, bsp] = scatter(n.b, vs, cosine_weighted_direction((1.0 / wbn) * wb, e1, e2));
        push_pair(n.xa, asp, n.xb, bsp, n.tau, n.sign, n.depth);
        push_pair(n.xa, vs, n.xb, vs, n.tau, -n.sign, n.depth);
        n.a = ap;
        n.b = bp;
      } else if (acc_a) {
        const auto [ap, asp] = scatter(n.a, vs, cosine_weighted_direction((1.0 / wan) * wa, e1, e2));
        push_pair(n.xa, asp, n.xa, vs, n.tau, n.sign, n.depth);
        n.a = ap;
      } else {
        const auto [bp, bsp] = scatter(n.b, vs, cosine_weighted_direction((1.0 / wbn) * wb, e1, e2));
        push_pair(n.xb, bsp, n.xb, vs, n.tau, -n.sign, n.depth);
        n.b = bp;
      }
      if (n.a == n.b && (!track_x_ || n.xa == n.xb)) return 0.0;
    }
  }

  const TestFunction& g_;
  const SemigroupOptions& o_;
  Rng& rng_;
  bool track_x_;
  int d_;
  double m1_;
  std::uniform_real_distribution<double> u01_{0.0, 1.0};
  std::vector<Node> stack_;
};

void finish(SemigroupEstimate& est, const std::vector<double>& vals) {
  const double n = static_cast<double>(vals.size());
  double mean = 0.0;
  for (double x : vals) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : vals) ss += (x - mean) * (x - mean);
  est.value = mean;
  est.stderr_ = vals.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  est.samples = vals.size();
}

void check_pair(const TestFunction& h, const TestFunction& g) {
  if (h.d != g.d) throw std::invalid_argument("semigroup_mc: h and g differ in dimension");
}

}  // namespace

SemigroupEstimate semigroup_mc(const TestFunction& h, const TestFunction& g,
                               const SemigroupOptions& options) {
  check_pair(h, g);
  if (options.t < 0.0) throw std::invalid_argument("semigroup_mc: t must be non-negative");
  if (options.samples < 2) throw std::invalid_argument("semigroup_mc: need at least two samples");
  if (options.n_max < 0) throw std::invalid_argument("semigroup_mc: n_max must be non-negative");
  const int d = g.d;
  std::vector<double> vals(options.samples);
  std::vector<SampleOut> outs(options.samples);
  parallel_for(options.samples, worker_count(options.threads), [&](std::size_t i) {
    Rng rng = make_stream(options.seed, i);
    const Vec x = uniform_torus_point(d, rng);
    const Vec v = maxwellian_sample(d, rng);
    Brancher br(g, options, rng);
    outs[i] = br.run(x, v);
    vals[i] = h(x, v) * outs[i].score;
  });
  SemigroupEstimate est;
  finish(est, vals);
  est.n_max = options.n_max;
  est.seed = options.seed;
  est.events_histogram.assign(kHistBins, 0);
  double events = 0.0, time = 0.0, nodes = 0.0;
  for (const auto& o : outs) {
    events += static_cast<double>(o.events);
    time += o.branch_time;
    nodes += static_cast<double>(o.nodes);
    ++est.events_histogram[std::min(o.events, kHistBins - 1)];
  }
  est.branching_rate = time > 0.0 ? events / time : 0.0;
  est.mean_nodes = nodes / static_cast<double>(outs.size());
  const double ct = est.branching_rate * options.t;
  est.bias_bound =
      ct > 0.0 ? std::exp(options.n_max * std::log(ct) - std::lgamma(options.n_max + 1.0)) : 0.0;
  return est;
}

SemigroupEstimate jump_process_mc(const TestFunction& h, const TestFunction& g, double t,
                                  std::size_t samples, std::uint64_t seed, unsigned threads) {
  check_pair(h, g);
  if (samples < 2) throw std::invalid_argument("jump_process_mc: need at least two samples");
  const int d = g.d;
  std::vector<double> vals(samples);
  std::vector<std::size_t> jumps(samples);
  parallel_for(samples, worker_count(threads), [&](std::size_t i) {
    Rng rng = make_stream(seed, i);
    const Vec x0 = uniform_torus_point(d, rng);
    const Vec v0 = maxwellian_sample(d, rng);
    Vec x = x0, v = v0;
    double tau = t;
    for (;;) {
      const double s = std::exponential_distribution<double>(collision_rate(v))(rng);
      if (s >= tau) break;
      tau -= s;
      x = wrap(x - s * v);
      const PartnerDraw p = sample_collision_partner(v, rng);
      v = scatter(v, p.v_star, p.eta).first;
      ++jumps[i];
    }
    vals[i] = h(x0, v0) * g(wrap(x - tau * v), v);
  });
  SemigroupEstimate est;
  finish(est, vals);
  est.seed = seed;
  est.events_histogram.assign(kHistBins, 0);
  for (auto j : jumps) ++est.events_histogram[std::min(j, kHistBins - 1)];
  return est;
}

}  // namespace hsfluct
