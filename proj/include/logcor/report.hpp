#pragma once

// Experiment outputs: per-statistic reports, acceptance-band checks and
// plot-ready series. Serialization is deterministic (no timestamps, sorted
// JSON keys, %.17g numbers).

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace logcor {

struct ExperimentReport {
  std::string experiment;
  std::string statistic;
  double estimate = 0.0;
  double se = 0.0;
  std::uint64_t replicas = 1;
  double theory = NAN;  ///< NaN when no closed form applies
  std::string citation;
  std::uint64_t seed = 0;
};

struct Check {
  std::string name;
  double value = 0.0;
  double lo = -INFINITY;
  double hi = INFINITY;
  bool pass = false;
  std::string note;
};

inline Check band_check(std::string name, double value, double lo, double hi, std::string note = {}) {
  return {std::move(name), value, lo, hi, std::isfinite(value) && value >= lo && value <= hi, std::move(note)};
}

struct PlotRow {
  double x = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double theory = NAN;
};

struct ExperimentResult {
  std::vector<ExperimentReport> reports;
  std::vector<Check> checks;
  std::map<std::string, std::vector<PlotRow>> plots;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace report_detail {

inline nlohmann::json number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

inline std::string csv_number(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace report_detail

inline nlohmann::json to_json(const ExperimentReport& r) {
  return {{"type", "report"},
          {"experiment", r.experiment},
          {"statistic", r.statistic},
          {"estimate", report_detail::number(r.estimate)},
          {"se", report_detail::number(r.se)},
          {"replicas", r.replicas},
          {"theory", report_detail::number(r.theory)},
          {"citation", r.citation},
          {"seed", r.seed}};
}

inline nlohmann::json to_json(const Check& c) {
  return {{"type", "check"},
          {"name", c.name},
          {"value", report_detail::number(c.value)},
          {"lo", report_detail::number(c.lo)},
          {"hi", report_detail::number(c.hi)},
          {"pass", c.pass},
          {"note", c.note}};
}

/// One JSON object per line: reports first, then checks.
inline void write_jsonl(std::ostream& os, const ExperimentResult& res) {
  for (const auto& r : res.reports) os << to_json(r).dump() << '\n';
  for (const auto& c : res.checks) os << to_json(c).dump() << '\n';
}

inline void write_summary_csv(std::ostream& os, const ExperimentResult& res) {
  using namespace report_detail;
  os << "experiment,statistic,estimate,se,replicas,theory,citation,seed\n";
  for (const auto& r : res.reports)
    os << csv_text(r.experiment) << ',' << csv_text(r.statistic) << ',' << csv_number(r.estimate) << ','
       << csv_number(r.se) << ',' << r.replicas << ',' << csv_number(r.theory) << ',' << csv_text(r.citation) << ','
       << r.seed << '\n';
}

inline void write_checks_csv(std::ostream& os, const ExperimentResult& res) {
  using namespace report_detail;
  os << "check,value,lo,hi,pass,note\n";
  for (const auto& c : res.checks)
    os << csv_text(c.name) << ',' << csv_number(c.value) << ',' << csv_number(c.lo) << ',' << csv_number(c.hi) << ','
       << (c.pass ? "true" : "false") << ',' << csv_text(c.note) << '\n';
}

inline void write_plot_csv(std::ostream& os, const std::vector<PlotRow>& rows) {
  using namespace report_detail;
  os << "x,estimate,se,theory\n";
  for (const auto& r : rows)
    os << csv_number(r.x) << ',' << csv_number(r.estimate) << ',' << csv_number(r.se) << ',' << csv_number(r.theory)
       << '\n';
}

}  // namespace logcor
