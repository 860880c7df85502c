#include "hsfluct/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include "hsfluct/graph.hpp"
#include "hsfluct/parallel.hpp"

namespace hsfluct {

namespace {
constexpr std::uint64_t kCenteringTag = 0x63656e746572ULL;
}

double empirical_average(const Configuration& c, const TestFunction& g, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("empirical_average: mu must be positive");
  double s = 0.0;
  for (const auto& p : c.particles) s += g(p.x, p.v);
  return s / mu;
}

double fluctuation_field(const Configuration& c, const TestFunction& g, double center, double mu) {
  return std::sqrt(mu) * (empirical_average(c, g, mu) - center);
}

void CovarianceParams::validate() const {
  ensemble.validate();
  if (replicas < 100) throw std::invalid_argument("covariance: need at least 100 replicas");
  if (centering_replicas < 2)
    throw std::invalid_argument("covariance: need at least 2 centering replicas");
  if (!(max_failure_fraction >= 0.0 && max_failure_fraction < 1.0))
    throw std::invalid_argument("covariance: max_failure_fraction must lie in [0, 1)");
  if (diagnostics) conditioning.validate();
}

std::pair<double, double> covariance_with_jackknife(const std::vector<double>& a,
                                                    const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n != b.size()) throw std::invalid_argument("covariance: length mismatch");
  if (n < 3) throw std::invalid_argument("covariance: need at least 3 pairs");
  // shift by the first pair to limit cancellation
  const double a0 = a[0], b0 = b[0];
  double sa = 0.0, sb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sa += a[i] - a0;
    sb += b[i] - b0;
    sab += (a[i] - a0) * (b[i] - b0);
  }
  const double nn = static_cast<double>(n);
  const double cov = (sab - sa * sb / nn) / (nn - 1.0);
  const double m = nn - 1.0;
  std::vector<double> loo(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = a[i] - a0, bi = b[i] - b0;
    loo[i] = (sab - ai * bi - (sa - ai) * (sb - bi) / m) / (m - 1.0);
    mean += loo[i];
  }
  mean /= nn;
  double ss = 0.0;
  for (double x : loo) ss += (x - mean) * (x - mean);
  return {cov, std::sqrt((nn - 1.0) / nn * ss)};
}

std::vector<CovarianceResult> covariance_series(const TestFunction& h, const TestFunction& g,
                                                const std::vector<double>& times,
                                                const CovarianceParams& params) {
  params.validate();
  if (times.empty()) throw std::invalid_argument("covariance: no evaluation times");
  for (std::size_t j = 0; j < times.size(); ++j)
    if (times[j] < 0.0 || (j > 0 && times[j] <= times[j - 1]))
      throw std::invalid_argument("covariance: times must be non-negative and increasing");
  if (h.d != params.ensemble.d || g.d != params.ensemble.d)
    throw std::invalid_argument("covariance: test function dimension differs from the ensemble");
  const EnsembleParams& ens = params.ensemble;
  const double mu = ens.mu;
  const unsigned threads = worker_count(params.threads);

  // centering constants from a disjoint batch
  const std::uint64_t center_seed = mix_seed(ens.seed, kCenteringTag);
  std::vector<double> ch(params.centering_replicas), cg(params.centering_replicas);
  parallel_for(params.centering_replicas, threads, [&](std::size_t i) {
    Rng rng = make_stream(center_seed, i);
    const Configuration c = sample_gibbs(ens, rng);
    ch[i] = empirical_average(c, h, mu);
    cg[i] = empirical_average(c, g, mu);
  });
  const double center_h = mean_and_stderr(ch).mean;
  const double center_g = mean_and_stderr(cg).mean;

  // evaluation schedule: output times plus Upsilon grid times
  struct Stop {
    double time;
    int output;     // index into times, or -1
    bool grid;      // an Upsilon grid time
  };
  std::vector<Stop> stops;
  for (std::size_t j = 0; j < times.size(); ++j) stops.push_back({times[j], static_cast<int>(j), false});
  if (params.diagnostics)
    for (double tk : upsilon_times(times.back(), params.conditioning.delta))
      stops.push_back({tk, -1, true});
  std::stable_sort(stops.begin(), stops.end(),
                   [](const Stop& x, const Stop& y) { return x.time < y.time; });

  const std::size_t R = params.replicas, T = times.size();
  std::vector<double> zg(R), zh(R * T), events(R * T);
  std::vector<char> ups_fail(R * T, 0), recoll(R * T, 0), failed(R, 0);
  std::vector<std::string> errors(R);

  parallel_for(R, threads, [&](std::size_t i) {
    try {
      Rng rng = make_stream(ens.seed, i);
      const Configuration c0 = sample_gibbs(ens, rng);
      zg[i] = fluctuation_field(c0, g, center_g, mu);
      FlowOptions fo = params.flow;
      fo.seed = mix_seed(ens.seed, i);
      fo.record_log = params.diagnostics;
      HardSphereFlow flow(c0, fo);
      double first_grid_fail = std::numeric_limits<double>::infinity();
      for (const Stop& s : stops) {
        flow.advance_to(s.time);
        bool ok = true;
        if (params.diagnostics) {
          // once a grid step fails every later horizon fails as well
          if (s.grid && s.time >= first_grid_fail) {
            ok = false;
          } else {
            ok = upsilon_step(flow.state(), s.time, params.conditioning).ok;
            if (!ok && s.grid) first_grid_fail = std::min(first_grid_fail, s.time);
          }
        }
        if (s.output >= 0) {
          const auto j = static_cast<std::size_t>(s.output);
          zh[i * T + j] = fluctuation_field(flow.state(), h, center_h, mu);
          events[i * T + j] = static_cast<double>(flow.event_count());
          if (params.diagnostics) {
            ups_fail[i * T + j] = (!ok || first_grid_fail <= s.time) ? 1 : 0;
            const double w = std::min(params.conditioning.delta, s.time);
            const CollisionGraph gr =
                collision_graph(flow.log(), static_cast<int>(c0.size()), 0.0, w);
            recoll[i * T + j] = first_cycle_event(gr).has_value() ? 1 : 0;
          }
        }
      }
    } catch (const std::exception& e) {
      failed[i] = 1;
      errors[i] = e.what();
    }
  });

  std::size_t nfail = 0;
  std::string first_error;
  for (std::size_t i = 0; i < R; ++i)
    if (failed[i]) {
      if (nfail == 0) first_error = "replica " + std::to_string(i) + ": " + errors[i];
      ++nfail;
    }
  if (static_cast<double>(nfail) > params.max_failure_fraction * static_cast<double>(R))
    throw std::runtime_error("covariance: " + std::to_string(nfail) + " of " + std::to_string(R) +
                             " replicas aborted; first failure " + first_error);

  std::vector<CovarianceResult> out(T);
  for (std::size_t j = 0; j < T; ++j) {
    std::vector<double> a, b, u, rc, ev;
    for (std::size_t i = 0; i < R; ++i) {
      if (failed[i]) continue;
      a.push_back(zh[i * T + j]);
      b.push_back(zg[i]);
      u.push_back(ups_fail[i * T + j]);
      rc.push_back(recoll[i * T + j]);
      ev.push_back(events[i * T + j]);
    }
    CovarianceResult& r = out[j];
    r.t = times[j];
    std::tie(r.cov, r.stderr_) = covariance_with_jackknife(a, b);
    r.replicas = a.size();
    r.failures = nfail;
    r.center_h = center_h;
    r.center_g = center_g;
    r.mean_collisions = mean_and_stderr(ev).mean;
    if (params.diagnostics) {
      const auto mu_ = mean_and_stderr(u), mr = mean_and_stderr(rc);
      r.upsilon_fail_rate = mu_.mean;
      r.upsilon_stderr = mu_.stderr_;
      r.recollision_rate = mr.mean;
      r.recollision_stderr = mr.stderr_;
    }
  }
  return out;
}

CovarianceResult covariance_estimate(const TestFunction& h, const TestFunction& g, double t,
                                     const CovarianceParams& params) {
  return covariance_series(h, g, {t}, params).front();
}

}  // namespace hsfluct
