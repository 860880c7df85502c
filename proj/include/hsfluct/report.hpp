// CSV / JSON / SVG persistence for convergence reports.
#pragma once

#include <string>
#include <vector>

#include "hsfluct/experiment.hpp"

namespace hsfluct {

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{"epsilon",   "t",           "cov",
                                             "cov_stderr", "semigroup",  "sg_stderr",
                                             "discrepancy", "upsilon_fail_rate", "recollision_rate"};
  return cols;
}

std::string report_csv(const CovarianceReport& report);
std::string report_json(const CovarianceReport& report);

/// Rebuilds the config stored in a manifest written by report_json.
ExperimentConfig config_from_json(const std::string& text);

/// Rebuilds a whole report (config, rows, flags, semigroup estimates) from a
/// manifest; null numbers come back as NaN.
CovarianceReport report_from_json(const std::string& text);

std::string covariance_plot_svg(const CovarianceReport& report);
std::string discrepancy_plot_svg(const CovarianceReport& report);

enum class ReportFormat { kCsv, kJson };

/// Writes report.csv or report.json (plus plot_covariance.svg and
/// plot_discrepancy.svg when plots is set) under report.config.output_dir.
/// Returns the paths written. I/O failures throw std::runtime_error.
std::vector<std::string> emit_report(const CovarianceReport& report, ReportFormat format,
                                     bool plots);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace hsfluct
