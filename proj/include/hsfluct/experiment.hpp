// The end-to-end convergence experiment: particle covariance against the
// limiting semigroup over an (epsilon, t) grid.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hsfluct/fluctuation.hpp"
#include "hsfluct/semigroup_mc.hpp"

namespace hsfluct {

struct ExperimentConfig {
  int d = 3;
  std::vector<double> epsilons{0.12, 0.08, 0.05};
  std::vector<double> times{0.2, 0.5};
  std::string h = "v1";
  std::string g = "v1";
  std::size_t replicas = 2000;
  std::size_t centering_replicas = 2000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  // conditioning; non-positive values select the defaults for each epsilon
  int gamma = 4;
  double delta = 0.0;
  double V = 0.0;
  double L = 0.0;
  bool diagnostics = true;
  std::size_t sg_samples = 100000;
  int n_max = 40;
  std::string sampler = "partial";  // partial | wholesale
  std::size_t max_events = 1000000;
  std::string output_dir = ".";

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;
  /// Sets one key from its text form; unknown keys throw.
  void set(const std::string& key, const std::string& value);
  /// All keys in text form (seed only when set).
  std::map<std::string, std::string> to_map() const;
  static std::vector<std::string> keys();

  ConditioningParams conditioning_for(double epsilon) const;
};

/// Reads a flat key=value file ('#' starts a comment).
std::map<std::string, std::string> read_key_value_file(const std::string& path);

struct CovarianceRow {
  double epsilon = 0.0;
  double t = 0.0;
  double cov = 0.0, cov_stderr = 0.0;
  std::size_t replicas = 0, failures = 0;
  double semigroup = 0.0, sg_stderr = 0.0;
  double discrepancy = 0.0;
  double upsilon_fail_rate = 0.0, upsilon_stderr = 0.0;
  double recollision_rate = 0.0, recollision_stderr = 0.0;
  std::string error;  // non-empty when the grid point failed
};

struct MonotoneFlag {
  double t = 0.0;
  bool checked = false;  // fewer than two valid epsilons: no claim
  bool ok = true;
};

struct CovarianceReport {
  ExperimentConfig config;
  std::vector<CovarianceRow> rows;  // epsilon-major, in grid order
  std::vector<MonotoneFlag> monotone;
  std::vector<SemigroupEstimate> semigroup;  // one per t
};

/// Discrepancy must not grow as epsilon decreases, up to one combined
/// standard error between neighbouring grid points.
std::vector<MonotoneFlag> monotonicity_flags(const std::vector<CovarianceRow>& rows,
                                             const std::vector<double>& times);

CovarianceReport convergence_experiment(const ExperimentConfig& cfg);

struct DiagnosticsRow {
  double epsilon = 0.0;
  double t = 0.0;
  std::size_t replicas = 0;
  double upsilon_fail_rate = 0.0, upsilon_stderr = 0.0;
  double recollision_rate = 0.0, recollision_stderr = 0.0;
  double mean_collisions = 0.0;
};

/// Upsilon failure and recollision rates per (epsilon, t), using the same
/// replica seeds as convergence_experiment.
std::vector<DiagnosticsRow> diagnostics_scan(const ExperimentConfig& cfg);

/// True when each value is at most its predecessor plus one combined
/// standard error; the input is ordered by decreasing epsilon.
bool nonincreasing_with_slack(const std::vector<double>& values,
                              const std::vector<double>& stderrs);

}  // namespace hsfluct
