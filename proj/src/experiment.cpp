#include "hsfluct/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hsfluct {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config key '" + key + "': not a number: '" + v + "'");
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("config key '" + key + "': not a non-negative integer: '" + v + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': integer out of range: '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (trim(v.substr(used)).empty()) return x;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config key '" + key + "': not an integer: '" + v + "'");
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("config key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    s += format_real(xs[i]);
  }
  return s;
}

}  // namespace

std::vector<std::string> ExperimentConfig::keys() {
  return {"d",     "epsilons", "times",       "h",          "g",      "replicas",
          "centering_replicas", "seed", "threads", "gamma",    "delta",  "V",
          "L",     "diagnostics", "sg_samples", "n_max",     "sampler", "max_events",
          "output_dir"};
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "d") d = parse_int(key, v);
  else if (key == "epsilons") epsilons = parse_list(key, v);
  else if (key == "times") times = parse_list(key, v);
  else if (key == "h") h = v;
  else if (key == "g") g = v;
  else if (key == "replicas") replicas = parse_uint(key, v);
  else if (key == "centering_replicas") centering_replicas = parse_uint(key, v);
  else if (key == "seed") seed = parse_uint(key, v);
  else if (key == "threads") threads = static_cast<unsigned>(parse_uint(key, v));
  else if (key == "gamma") gamma = parse_int(key, v);
  else if (key == "delta") delta = parse_double(key, v);
  else if (key == "V") V = parse_double(key, v);
  else if (key == "L") L = parse_double(key, v);
  else if (key == "diagnostics") diagnostics = parse_bool(key, v);
  else if (key == "sg_samples") sg_samples = parse_uint(key, v);
  else if (key == "n_max") n_max = parse_int(key, v);
  else if (key == "sampler") sampler = v;
  else if (key == "max_events") max_events = parse_uint(key, v);
  else if (key == "output_dir") output_dir = v;
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["d"] = std::to_string(d);
  m["epsilons"] = join(epsilons);
  m["times"] = join(times);
  m["h"] = h;
  m["g"] = g;
  m["replicas"] = std::to_string(replicas);
  m["centering_replicas"] = std::to_string(centering_replicas);
  if (seed) m["seed"] = std::to_string(*seed);
  m["threads"] = std::to_string(threads);
  m["gamma"] = std::to_string(gamma);
  m["delta"] = format_real(delta);
  m["V"] = format_real(V);
  m["L"] = format_real(L);
  m["diagnostics"] = diagnostics ? "true" : "false";
  m["sg_samples"] = std::to_string(sg_samples);
  m["n_max"] = std::to_string(n_max);
  m["sampler"] = sampler;
  m["max_events"] = std::to_string(max_events);
  m["output_dir"] = output_dir;
  return m;
}

void ExperimentConfig::validate() const {
  if (d != 2 && d != 3) throw std::invalid_argument("config key 'd': must be 2 or 3");
  if (epsilons.empty()) throw std::invalid_argument("config key 'epsilons': grid is empty");
  for (double e : epsilons)
    if (!(e > 0.0 && e < 0.25))
      throw std::invalid_argument("config key 'epsilons': values must lie in (0, 1/4)");
  if (times.empty()) throw std::invalid_argument("config key 'times': grid is empty");
  for (std::size_t j = 0; j < times.size(); ++j)
    if (times[j] < 0.0 || (j > 0 && times[j] <= times[j - 1]))
      throw std::invalid_argument("config key 'times': must be non-negative and increasing");
  if (replicas < 100) throw std::invalid_argument("config key 'replicas': must be at least 100");
  if (centering_replicas < 2)
    throw std::invalid_argument("config key 'centering_replicas': must be at least 2");
  if (!seed) throw std::invalid_argument("config key 'seed': required");
  if (gamma < 2) throw std::invalid_argument("config key 'gamma': must be at least 2");
  if (sg_samples < 2) throw std::invalid_argument("config key 'sg_samples': must be at least 2");
  if (n_max < 0) throw std::invalid_argument("config key 'n_max': must be non-negative");
  if (sampler != "partial" && sampler != "wholesale")
    throw std::invalid_argument("config key 'sampler': must be 'partial' or 'wholesale'");
  if (max_events == 0) throw std::invalid_argument("config key 'max_events': must be positive");
  make_test_function(h, d);
  make_test_function(g, d);
}

ConditioningParams ExperimentConfig::conditioning_for(double epsilon) const {
  ConditioningParams c = ConditioningParams::defaults(epsilon, d);
  c.gamma = gamma;
  if (delta > 0.0) c.delta = delta;
  if (V > 0.0) c.V = V;
  c.L = L > 0.0 ? L : 2.0 * c.delta * c.V;
  return c;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::vector<MonotoneFlag> monotonicity_flags(const std::vector<CovarianceRow>& rows,
                                             const std::vector<double>& times) {
  std::vector<MonotoneFlag> flags;
  for (double t : times) {
    std::vector<const CovarianceRow*> pts;
    for (const auto& r : rows)
      if (r.t == t && r.error.empty()) pts.push_back(&r);
    std::stable_sort(pts.begin(), pts.end(), [](const CovarianceRow* a, const CovarianceRow* b) {
      return a->epsilon > b->epsilon;
    });
    MonotoneFlag f;
    f.t = t;
    f.checked = pts.size() >= 2;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      auto se = [](const CovarianceRow* r) {
        return r->cov_stderr * r->cov_stderr + r->sg_stderr * r->sg_stderr;
      };
      const double slack = std::sqrt(se(pts[k]) + se(pts[k - 1]));
      if (pts[k]->discrepancy > pts[k - 1]->discrepancy + slack) f.ok = false;
    }
    flags.push_back(f);
  }
  return flags;
}

namespace {

CovarianceParams covariance_params(const ExperimentConfig& cfg, std::size_t e) {
  const double eps = cfg.epsilons[e];
  CovarianceParams cp;
  cp.ensemble = boltzmann_grad_params(eps, cfg.d, mix_seed(*cfg.seed, e));
  cp.ensemble.sampler =
      cfg.sampler == "wholesale" ? SamplerKind::kWholesaleRejection : SamplerKind::kPartialRejection;
  cp.replicas = cfg.replicas;
  cp.centering_replicas = cfg.centering_replicas;
  cp.threads = cfg.threads;
  cp.flow.max_events = cfg.max_events;
  cp.diagnostics = cfg.diagnostics;
  cp.conditioning = cfg.conditioning_for(eps);
  return cp;
}

}  // namespace

bool nonincreasing_with_slack(const std::vector<double>& values,
                              const std::vector<double>& stderrs) {
  if (values.size() != stderrs.size())
    throw std::invalid_argument("nonincreasing_with_slack: length mismatch");
  for (std::size_t k = 1; k < values.size(); ++k) {
    const double slack = std::hypot(stderrs[k], stderrs[k - 1]);
    if (values[k] > values[k - 1] + slack) return false;
  }
  return true;
}

std::vector<DiagnosticsRow> diagnostics_scan(const ExperimentConfig& cfg) {
  cfg.validate();
  const TestFunction h = make_test_function(cfg.h, cfg.d);
  const TestFunction g = make_test_function(cfg.g, cfg.d);
  std::vector<DiagnosticsRow> rows;
  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    CovarianceParams cp = covariance_params(cfg, e);
    cp.diagnostics = true;
    const auto res = covariance_series(h, g, cfg.times, cp);
    for (const auto& r : res) {
      DiagnosticsRow row;
      row.epsilon = cfg.epsilons[e];
      row.t = r.t;
      row.replicas = r.replicas;
      row.upsilon_fail_rate = r.upsilon_fail_rate;
      row.upsilon_stderr = r.upsilon_stderr;
      row.recollision_rate = r.recollision_rate;
      row.recollision_stderr = r.recollision_stderr;
      row.mean_collisions = r.mean_collisions;
      rows.push_back(row);
    }
  }
  return rows;
}

CovarianceReport convergence_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  CovarianceReport rep;
  rep.config = cfg;
  const TestFunction h = make_test_function(cfg.h, cfg.d);
  const TestFunction g = make_test_function(cfg.g, cfg.d);
  const std::uint64_t seed = *cfg.seed;

  for (std::size_t j = 0; j < cfg.times.size(); ++j) {
    SemigroupOptions so;
    so.t = cfg.times[j];
    so.n_max = cfg.n_max;
    so.samples = cfg.sg_samples;
    so.seed = mix_seed(seed, 1000 + j);
    so.threads = cfg.threads;
    rep.semigroup.push_back(semigroup_mc(h, g, so));
  }

  for (std::size_t e = 0; e < cfg.epsilons.size(); ++e) {
    const double eps = cfg.epsilons[e];
    const CovarianceParams cp = covariance_params(cfg, e);
    std::vector<CovarianceResult> res;
    std::string err;
    try {
      res = covariance_series(h, g, cfg.times, cp);
    } catch (const std::exception& ex) {
      err = ex.what();
    }
    for (std::size_t j = 0; j < cfg.times.size(); ++j) {
      CovarianceRow row;
      row.epsilon = eps;
      row.t = cfg.times[j];
      row.semigroup = rep.semigroup[j].value;
      row.sg_stderr = rep.semigroup[j].stderr_;
      if (!err.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.cov = row.cov_stderr = row.discrepancy = nan;
        row.upsilon_fail_rate = row.recollision_rate = nan;
        row.error = err;
      } else {
        const auto& r = res[j];
        row.cov = r.cov;
        row.cov_stderr = r.stderr_;
        row.replicas = r.replicas;
        row.failures = r.failures;
        row.discrepancy = std::abs(r.cov - row.semigroup);
        row.upsilon_fail_rate = r.upsilon_fail_rate;
        row.upsilon_stderr = r.upsilon_stderr;
        row.recollision_rate = r.recollision_rate;
        row.recollision_stderr = r.recollision_stderr;
        if (!cfg.diagnostics) {
          // not measured
          const double nan = std::numeric_limits<double>::quiet_NaN();
          row.upsilon_fail_rate = row.upsilon_stderr = nan;
          row.recollision_rate = row.recollision_stderr = nan;
        }
      }
      rep.rows.push_back(row);
    }
  }
  rep.monotone = monotonicity_flags(rep.rows, cfg.times);
  return rep;
}

}  // namespace hsfluct
