#include "hsfluct/report.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hsfluct {

namespace {

using nlohmann::ordered_json;

ordered_json real_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["d"] = c.d;
  j["epsilons"] = c.epsilons;
  j["times"] = c.times;
  j["h"] = c.h;
  j["g"] = c.g;
  j["replicas"] = c.replicas;
  j["centering_replicas"] = c.centering_replicas;
  if (c.seed) j["seed"] = *c.seed;
  j["threads"] = c.threads;
  j["gamma"] = c.gamma;
  j["delta"] = c.delta;
  j["V"] = c.V;
  j["L"] = c.L;
  j["diagnostics"] = c.diagnostics;
  j["sg_samples"] = c.sg_samples;
  j["n_max"] = c.n_max;
  j["sampler"] = c.sampler;
  j["max_events"] = c.max_events;
  j["output_dir"] = c.output_dir;
  return j;
}

std::string scalar_text(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_real(v.get<double>());
  throw std::invalid_argument("manifest: unsupported config value " + v.dump());
}

// --- minimal SVG line charts ---

struct Series {
  std::string label;
  std::vector<double> x, y, err;
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string svg_chart(const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 150, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i] - s.err[i]);
      y1 = std::max(y1, s.y[i] + s.err[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  char buf[256];
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
    << "</text>\n";
  std::snprintf(buf, sizeof buf,
                "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  o << buf;
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n", px(xv),
                  H - B + 16, xv);
    o << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3g</text>\n",
                  L - 6, py(yv) + 4, yv);
    o << buf;
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
    << xlabel << "</text>\n";
  o << "<text transform=\"translate(16," << (T + H - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = kColors[k % (sizeof kColors / sizeof kColors[0])];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
      pts += buf;
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\"/>\n"
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                    px(s.x[i]), py(s.y[i] - s.err[i]), px(s.x[i]), py(s.y[i] + s.err[i]), col,
                    px(s.x[i]), py(s.y[i]), col);
      o << buf;
    }
    if (!pts.empty())
      o << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"" << pts << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%g\" y=\"%g\" width=\"12\" height=\"12\" fill=\"%s\"/>"
                  "<text x=\"%g\" y=\"%g\">%s</text>\n",
                  W - R + 12, T + 18.0 * k, col, W - R + 30, T + 18.0 * k + 10, s.label.c_str());
    o << buf;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace

std::string report_csv(const CovarianceReport& report) {
  std::string out;
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  out += '\n';
  for (const auto& r : report.rows) {
    const double vals[] = {r.epsilon,   r.t,         r.cov,
                           r.cov_stderr, r.semigroup, r.sg_stderr,
                           r.discrepancy, r.upsilon_fail_rate, r.recollision_rate};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      if (i) out += ',';
      out += format_real(vals[i]);
    }
    out += '\n';
  }
  return out;
}

std::string report_json(const CovarianceReport& report) {
  const ExperimentConfig& c = report.config;
  ordered_json j;
  j["config"] = config_json(c);
  if (c.d == 2) j["label"] = "outside theorem hypotheses (d=2)";

  ordered_json seeds = ordered_json::object();
  if (c.seed) {
    seeds["master"] = *c.seed;
    ordered_json ens = ordered_json::array(), sg = ordered_json::array();
    for (std::size_t e = 0; e < c.epsilons.size(); ++e)
      ens.push_back({{"epsilon", c.epsilons[e]}, {"seed", mix_seed(*c.seed, e)}});
    for (std::size_t k = 0; k < c.times.size(); ++k)
      sg.push_back({{"t", c.times[k]}, {"seed", mix_seed(*c.seed, 1000 + k)}});
    seeds["ensemble"] = ens;
    seeds["semigroup"] = sg;
  }
  j["seeds"] = seeds;

  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json row;
    row["epsilon"] = r.epsilon;
    row["t"] = r.t;
    row["mu"] = boltzmann_grad_mu(r.epsilon, c.d);
    row["cov"] = real_or_null(r.cov);
    row["cov_stderr"] = real_or_null(r.cov_stderr);
    row["replicas"] = r.replicas;
    row["failures"] = r.failures;
    row["semigroup"] = real_or_null(r.semigroup);
    row["sg_stderr"] = real_or_null(r.sg_stderr);
    row["discrepancy"] = real_or_null(r.discrepancy);
    row["upsilon_fail_rate"] = real_or_null(r.upsilon_fail_rate);
    row["upsilon_stderr"] = real_or_null(r.upsilon_stderr);
    row["recollision_rate"] = real_or_null(r.recollision_rate);
    row["recollision_stderr"] = real_or_null(r.recollision_stderr);
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  j["rows"] = rows;

  ordered_json mono = ordered_json::array();
  for (const auto& f : report.monotone)
    mono.push_back({{"t", f.t}, {"checked", f.checked}, {"ok", f.ok}});
  j["monotone"] = mono;

  ordered_json sg = ordered_json::array();
  for (const auto& s : report.semigroup) sg.push_back(ordered_json::parse(s.to_json()));
  j["semigroup"] = sg;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  const ordered_json& cj = j.contains("config") ? j.at("config") : j;
  if (!cj.is_object()) throw std::invalid_argument("manifest: config is not an object");
  ExperimentConfig c;
  for (const auto& [key, v] : cj.items()) {
    if (v.is_array()) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += scalar_text(v[i]);
      }
      c.set(key, s);
    } else {
      c.set(key, scalar_text(v));
    }
  }
  return c;
}

CovarianceReport report_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  CovarianceReport rep;
  rep.config = config_from_json(text);
  auto num = [](const ordered_json& o, const char* key) {
    if (!o.contains(key) || o.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
    return o.at(key).get<double>();
  };
  for (const auto& r : j.value("rows", ordered_json::array())) {
    CovarianceRow row;
    row.epsilon = num(r, "epsilon");
    row.t = num(r, "t");
    row.cov = num(r, "cov");
    row.cov_stderr = num(r, "cov_stderr");
    row.replicas = r.value("replicas", std::size_t{0});
    row.failures = r.value("failures", std::size_t{0});
    row.semigroup = num(r, "semigroup");
    row.sg_stderr = num(r, "sg_stderr");
    row.discrepancy = num(r, "discrepancy");
    row.upsilon_fail_rate = num(r, "upsilon_fail_rate");
    row.upsilon_stderr = num(r, "upsilon_stderr");
    row.recollision_rate = num(r, "recollision_rate");
    row.recollision_stderr = num(r, "recollision_stderr");
    row.error = r.value("error", std::string{});
    rep.rows.push_back(row);
  }
  for (const auto& f : j.value("monotone", ordered_json::array()))
    rep.monotone.push_back({f.at("t").get<double>(), f.at("checked").get<bool>(),
                            f.at("ok").get<bool>()});
  for (const auto& s : j.value("semigroup", ordered_json::array())) {
    SemigroupEstimate e;
    e.value = num(s, "value");
    e.stderr_ = num(s, "stderr");
    e.samples = s.value("samples", std::size_t{0});
    e.n_max = s.value("n_max", 0);
    e.bias_bound = num(s, "bias_bound");
    e.seed = s.value("seed", std::uint64_t{0});
    rep.semigroup.push_back(e);
  }
  return rep;
}

std::string covariance_plot_svg(const CovarianceReport& report) {
  std::vector<Series> series;
  for (double eps : report.config.epsilons) {
    Series s;
    s.label = "eps=" + format_real(eps).substr(0, 6);
    for (const auto& r : report.rows)
      if (r.epsilon == eps) {
        s.x.push_back(r.t);
        s.y.push_back(r.cov);
        s.err.push_back(std::isfinite(r.cov_stderr) ? r.cov_stderr : 0.0);
      }
    series.push_back(s);
  }
  Series sg;
  sg.label = "semigroup";
  for (std::size_t k = 0; k < report.semigroup.size() && k < report.config.times.size(); ++k) {
    sg.x.push_back(report.config.times[k]);
    sg.y.push_back(report.semigroup[k].value);
    sg.err.push_back(report.semigroup[k].stderr_);
  }
  series.push_back(sg);
  return svg_chart("covariance vs t", "t", "E[zeta^t(h) zeta^0(g)]", series);
}

std::string discrepancy_plot_svg(const CovarianceReport& report) {
  std::vector<Series> series;
  for (double t : report.config.times) {
    Series s;
    s.label = "t=" + format_real(t).substr(0, 6);
    for (const auto& r : report.rows)
      if (r.t == t) {
        s.x.push_back(r.epsilon);
        s.y.push_back(r.discrepancy);
        const double se = std::hypot(r.cov_stderr, r.sg_stderr);
        s.err.push_back(std::isfinite(se) ? se : 0.0);
      }
    series.push_back(s);
  }
  return svg_chart("|cov - semigroup| vs epsilon", "epsilon", "discrepancy", series);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed: " + std::strerror(errno));
}

std::vector<std::string> emit_report(const CovarianceReport& report, ReportFormat format,
                                     bool plots) {
  namespace fs = std::filesystem;
  const fs::path dir = report.config.output_dir.empty() ? fs::path(".") : fs::path(report.config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& text) {
    const std::string p = (dir / name).string();
    write_text_file(p, text);
    written.push_back(p);
  };
  if (format == ReportFormat::kCsv)
    put("report.csv", report_csv(report));
  else
    put("report.json", report_json(report));
  if (plots) {
    put("plot_covariance.svg", covariance_plot_svg(report));
    put("plot_discrepancy.svg", discrepancy_plot_svg(report));
  }
  return written;
}

}  // namespace hsfluct
