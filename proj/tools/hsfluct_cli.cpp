// hsfluct command-line driver.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hsfluct/experiment.hpp"
#include "hsfluct/flow.hpp"
#include "hsfluct/galerkin.hpp"
#include "hsfluct/identity_checks.hpp"
#include "hsfluct/report.hpp"
#include "json.hpp"

using namespace hsfluct;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAssert = 2;

// Flags shared by every experiment subcommand: --config plus one flag per
// config key.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key=value config file");
    for (const auto& key : ExperimentConfig::keys())
      app->add_option("--" + key, values[key], "config key '" + key + "'");
  }

  ExperimentConfig build(const CLI::App* app, bool need_seed) const {
    ExperimentConfig cfg;
    if (!config_path.empty())
      for (const auto& [k, v] : read_key_value_file(config_path)) cfg.set(k, v);
    for (const auto& key : ExperimentConfig::keys())
      if (app->count("--" + key) > 0) cfg.set(key, values.at(key));
    if (need_seed && !cfg.seed) throw std::invalid_argument("--seed is required");
    return cfg;
  }
};

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

int cmd_simulate(const ExperimentConfig& cfg) {
  if (cfg.d != 2 && cfg.d != 3) throw std::invalid_argument("config key 'd': must be 2 or 3");
  if (cfg.epsilons.empty() || cfg.times.empty())
    throw std::invalid_argument("simulate: epsilons and times must be non-empty");
  const double eps = cfg.epsilons.front();
  const double t = cfg.times.back();
  EnsembleParams ens = boltzmann_grad_params(eps, cfg.d, *cfg.seed);
  ens.sampler =
      cfg.sampler == "wholesale" ? SamplerKind::kWholesaleRejection : SamplerKind::kPartialRejection;
  Rng rng = make_stream(ens.seed, 0);
  const Configuration c0 = sample_gibbs(ens, rng);
  FlowOptions fo;
  fo.max_events = cfg.max_events;
  fo.seed = *cfg.seed;
  const FlowResult r = run_flow(c0, t, fo);

  const std::string events = out_path(cfg, "events.csv");
  {
    std::ostringstream os;
    write_event_log_csv(os, r.log, cfg.d);
    write_text_file(events, os.str());
  }
  {
    std::ostringstream os;
    write_configuration(os, r.state);
    write_text_file(out_path(cfg, "final_state.txt"), os.str());
  }
  const Vec p0 = total_momentum(c0), p1 = total_momentum(r.state);
  double dp = 0.0;
  for (int k = 0; k < cfg.d; ++k) dp = std::max(dp, std::abs(p1[k] - p0[k]));
  nlohmann::ordered_json j;
  j["epsilon"] = eps;
  j["t"] = t;
  j["particles"] = c0.size();
  j["collisions"] = r.log.events.size();
  j["degenerate_events"] = r.degenerate_events;
  j["energy_drift"] = std::abs(kinetic_energy(r.state) - kinetic_energy(c0));
  j["momentum_drift"] = dp;
  j["event_log"] = events;
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int cmd_covariance(const ExperimentConfig& cfg, bool plots) {
  const CovarianceReport rep = convergence_experiment(cfg);
  for (const auto& p : emit_report(rep, ReportFormat::kCsv, plots)) std::cerr << "wrote " << p << "\n";
  for (const auto& p : emit_report(rep, ReportFormat::kJson, false)) std::cerr << "wrote " << p << "\n";
  std::cout << report_csv(rep);
  int rc = kExitOk;
  for (const auto& r : rep.rows)
    if (!r.error.empty())
      std::cerr << "grid point eps=" << format_real(r.epsilon) << " t=" << format_real(r.t)
                << " failed: " << r.error << "\n";
  for (const auto& f : rep.monotone)
    if (f.checked && !f.ok) {
      std::cerr << "assertion failed: discrepancy grows as epsilon decreases at t="
                << format_real(f.t) << "\n";
      rc = kExitAssert;
    }
  return rc;
}

int cmd_semigroup(const ExperimentConfig& cfg, bool oracle, int oracle_degree) {
  if (cfg.times.empty()) throw std::invalid_argument("semigroup: times must be non-empty");
  const TestFunction h = make_test_function(cfg.h, cfg.d);
  const TestFunction g = make_test_function(cfg.g, cfg.d);
  std::optional<GalerkinModel> model;
  if (oracle) {
    if (!h.velocity_only() || !g.velocity_only())
      throw std::invalid_argument("semigroup: --oracle needs velocity-only test functions");
    GalerkinOptions go;
    go.max_degree = oracle_degree;
    model.emplace(cfg.d, go);
  }
  for (std::size_t j = 0; j < cfg.times.size(); ++j) {
    SemigroupOptions so;
    so.t = cfg.times[j];
    so.n_max = cfg.n_max;
    so.samples = cfg.sg_samples;
    so.seed = mix_seed(*cfg.seed, 1000 + j);
    so.threads = cfg.threads;
    const SemigroupEstimate est = semigroup_mc(h, g, so);
    nlohmann::ordered_json out = nlohmann::ordered_json::parse(est.to_json());
    out = {{"t", so.t}, {"estimate", out}};
    if (model) {
      const SeriesResult s =
          duhamel_series_oracle(h.velocity, g.velocity, so.t, -1, *model, 1e-10, h.degree, g.degree);
      out["oracle"] = {{"value", s.value}, {"stderr", s.stderr_}, {"tail_bound", s.tail_bound},
                       {"terms", s.terms}};
    }
    std::cout << out.dump() << "\n";
  }
  return kExitOk;
}

int cmd_pseudotest(const ExperimentConfig& cfg, int systems, int particles, double epsilon,
                   double t, int cap, double tol) {
  Rng rng = make_stream(*cfg.seed, 0);
  double worst_dev = 0.0, worst_sg = 0.0;
  for (int s = 0; s < systems; ++s) {
    const SmallSystem sys = sample_small_system(cfg.d, particles, epsilon, t, 1 + s % 3, 3, rng);
    const IdentityResult dev = check_development_identity(sys, 0, probe_observable, cap);
    const IdentityResult sg = check_semigroup_identity(sys, probe_observable, 0.5 * t, cap);
    worst_dev = std::max(worst_dev, dev.error());
    worst_sg = std::max(worst_sg, sg.error());
    nlohmann::ordered_json j;
    j["system"] = s;
    j["collisions"] = sys.collisions;
    j["development_lhs"] = dev.lhs;
    j["development_rhs"] = dev.rhs;
    j["semigroup_direct"] = sg.lhs;
    j["semigroup_composed"] = sg.rhs;
    j["semigroup_nonzero_terms"] = sg.nonzero_terms;
    std::cout << j.dump() << "\n";
  }
  std::cerr << "max development error " << format_real(worst_dev) << ", max semigroup error "
            << format_real(worst_sg) << "\n";
  if (!(worst_dev <= tol) || !(worst_sg <= tol)) {
    std::cerr << "assertion failed: identity error above " << format_real(tol) << "\n";
    return kExitAssert;
  }
  return kExitOk;
}

int cmd_diagnostics(const ExperimentConfig& cfg) {
  const auto rows = diagnostics_scan(cfg);
  std::string csv =
      "epsilon,t,replicas,upsilon_fail_rate,upsilon_stderr,recollision_rate,recollision_stderr,"
      "mean_collisions\n";
  for (const auto& r : rows)
    csv += format_real(r.epsilon) + "," + format_real(r.t) + "," + std::to_string(r.replicas) +
           "," + format_real(r.upsilon_fail_rate) + "," + format_real(r.upsilon_stderr) + "," +
           format_real(r.recollision_rate) + "," + format_real(r.recollision_stderr) + "," +
           format_real(r.mean_collisions) + "\n";
  write_text_file(out_path(cfg, "diagnostics.csv"), csv);
  std::cout << csv;

  // epsilon order as configured must be decreasing for the scaling claim
  int rc = kExitOk;
  for (double t : cfg.times) {
    std::vector<std::pair<double, const DiagnosticsRow*>> pts;
    for (const auto& r : rows)
      if (r.t == t) pts.push_back({r.epsilon, &r});
    std::stable_sort(pts.begin(), pts.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<double> u, us, rr, rs;
    for (const auto& [e, r] : pts) {
      u.push_back(r->upsilon_fail_rate);
      us.push_back(r->upsilon_stderr);
      rr.push_back(r->recollision_rate);
      rs.push_back(r->recollision_stderr);
    }
    if (!nonincreasing_with_slack(u, us)) {
      std::cerr << "assertion failed: Upsilon failure rate grows as epsilon decreases at t="
                << format_real(t) << "\n";
      rc = kExitAssert;
    }
    if (!nonincreasing_with_slack(rr, rs)) {
      std::cerr << "assertion failed: recollision rate grows as epsilon decreases at t="
                << format_real(t) << "\n";
      rc = kExitAssert;
    }
  }
  return rc;
}

int cmd_report(const std::string& manifest, const std::string& output_dir, bool plots) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open manifest '" + manifest + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  CovarianceReport rep = report_from_json(ss.str());
  if (!output_dir.empty()) rep.config.output_dir = output_dir;
  for (const auto& p : emit_report(rep, ReportFormat::kCsv, plots)) std::cerr << "wrote " << p << "\n";
  std::cout << report_csv(rep);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hard-sphere fluctuation experiments"};
  app.require_subcommand(1);
  // -h would clash with the test-function key h
  app.set_help_flag("--help", "print this help message and exit");

  auto* sim = app.add_subcommand("simulate", "one Gibbs sample and flow run; writes events.csv");
  ConfigFlags sim_flags;
  sim_flags.attach(sim);

  auto* cov = app.add_subcommand("covariance", "covariance vs semigroup over the (epsilon, t) grid");
  ConfigFlags cov_flags;
  cov_flags.attach(cov);
  bool no_plots = false;
  cov->add_flag("--no-plots", no_plots, "skip the SVG plots");

  auto* sg = app.add_subcommand("semigroup", "Monte Carlo estimate of <h, e^{tL} g>");
  ConfigFlags sg_flags;
  sg_flags.attach(sg);
  bool oracle = false;
  int oracle_degree = 6;
  sg->add_flag("--oracle", oracle, "also evaluate the Galerkin series oracle");
  sg->add_option("--oracle-degree", oracle_degree, "Hermite degree of the oracle basis")
      ->check(CLI::Range(1, 12));

  auto* pt = app.add_subcommand("pseudotest", "development theorem and semigroup identities");
  ConfigFlags pt_flags;
  pt_flags.attach(pt);
  int systems = 50, particles = 3, cap = 3;
  double pt_eps = 0.1, pt_t = 0.3, tol = 1e-9;
  pt->add_option("--systems", systems, "number of sampled systems")->check(CLI::PositiveNumber);
  pt->add_option("--particles", particles, "particles per system")->check(CLI::Range(2, 5));
  pt->add_option("--epsilon", pt_eps, "particle diameter")->check(CLI::Range(1e-6, 0.2));
  pt->add_option("--t", pt_t, "time horizon")->check(CLI::PositiveNumber);
  pt->add_option("--kappa-cap", cap, "recollision budget cap")->check(CLI::Range(0, 3));
  pt->add_option("--tol", tol, "absolute tolerance");

  auto* diag = app.add_subcommand("diagnostics", "Upsilon and recollision rates per epsilon");
  ConfigFlags diag_flags;
  diag_flags.attach(diag);

  auto* rpt = app.add_subcommand("report", "re-emit CSV and plots from a JSON manifest");
  std::string manifest, rpt_dir;
  bool rpt_no_plots = false;
  rpt->add_option("manifest", manifest, "report.json")->required();
  rpt->add_option("--output_dir", rpt_dir, "output directory (default: from the manifest)");
  rpt->add_flag("--no-plots", rpt_no_plots, "skip the SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (*sim) return cmd_simulate(sim_flags.build(sim, true));
    if (*cov) return cmd_covariance(cov_flags.build(cov, true), !no_plots);
    if (*sg) return cmd_semigroup(sg_flags.build(sg, true), oracle, oracle_degree);
    if (*pt) return cmd_pseudotest(pt_flags.build(pt, true), systems, particles, pt_eps, pt_t, cap, tol);
    if (*diag) return cmd_diagnostics(diag_flags.build(diag, true));
    if (*rpt) return cmd_report(manifest, rpt_dir, !rpt_no_plots);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
