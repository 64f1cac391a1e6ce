#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "logcor/errors.hpp"
#include "logcor/experiments/config.hpp"
#include "logcor/parallel.hpp"
#include "logcor/report.hpp"
#include "logcor/rng.hpp"
#include "logcor/stats.hpp"

namespace logcor::exp {

/// State handed to an experiment body: merged configuration, seeding and
/// the result being assembled.
///
/// Seeding: a sub-design with integer tag t (for instance the depth n) gets
/// the master key stream_key(seed, t); its replica r then uses
/// replica_seed(stream_key(seed, t), r).
class Context {
 public:
  Context(std::string name, std::string citation, Config cfg, std::uint64_t seed, unsigned threads)
      : name_(std::move(name)), citation_(std::move(citation)), cfg_(std::move(cfg)), seed_(seed), threads_(threads) {}

  const std::string& name() const { return name_; }
  const Config& cfg() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  unsigned threads() const { return threads_; }
  ExperimentResult& result() { return result_; }

  std::uint64_t design_seed(std::uint64_t tag) const { return stream_key(seed_, tag); }
  std::uint64_t replica(std::uint64_t tag, std::uint64_t r) const { return replica_seed(design_seed(tag), r); }

  /// Positive replica count under `key`.
  std::uint64_t replicas(const std::string& key = "replicas") const {
    const long long r = cfg_.integer(key);
    detail::require(r >= 1, "'" + key + "' must be at least 1");
    return static_cast<std::uint64_t>(r);
  }

  void report(std::string statistic, double estimate, double se, std::uint64_t replicas, double theory = NAN) {
    result_.reports.push_back({name_, std::move(statistic), estimate, se, replicas, theory, citation_, seed_});
  }
  void report(std::string statistic, stats::Estimate e, std::uint64_t replicas, double theory = NAN) {
    report(std::move(statistic), e.value, e.se, replicas, theory);
  }

  void check(std::string check_name, double value, double lo, double hi, std::string note = {}) {
    result_.checks.push_back(band_check(std::move(check_name), value, lo, hi, std::move(note)));
  }

  void plot(const std::string& series, PlotRow row) { result_.plots[series].push_back(row); }

  /// Runs fn(r) for r in [0, count) on the worker pool; results in replica order.
  template <class T, class Fn>
  std::vector<T> map_replicas(std::uint64_t count, Fn&& fn) const {
    return parallel_map<T>(count, threads_, std::forward<Fn>(fn));
  }

 private:
  std::string name_, citation_;
  Config cfg_;
  std::uint64_t seed_;
  unsigned threads_;
  ExperimentResult result_;
};

struct Experiment {
  std::string name;
  std::string citation;
  std::string description;
  /// Documented keys with their default values.
  std::vector<std::pair<std::string, std::string>> defaults;
  std::function<void(Context&)> body;
};

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace logcor::exp
