#pragma once

// Named experiment registry and the file-writing driver.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "logcor/errors.hpp"
#include "logcor/experiments/brw_experiments.hpp"
#include "logcor/experiments/context.hpp"
#include "logcor/experiments/cue_experiments.hpp"
#include "logcor/experiments/gff_experiments.hpp"
#include "logcor/experiments/zeta_experiments.hpp"
#include "logcor/parallel.hpp"
#include "logcor/report.hpp"
#include "logcor/theory.hpp"

namespace logcor::exp {

/// The fixed registry, in listing order. Defaults encode the acceptance bands
/// checked by `--check`. Every entry also accepts `seed` and `threads`
/// (0 means $LOGCOR_THREADS, else 1).
inline const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> entries = {
      {"iid-gumbel", "iid-gumbel-limit", "KS distance of the recentered IID maximum to its Gumbel limit; 2^10 anchor",
       {{"n", "20"}, {"sigma2", "1"}, {"replicas", "2000"}, {"method", "explicit"}, {"ks_max", "0.05"},
        {"fig_n", "10"}, {"fig_sigma2", "0.34657359027997264"}, {"fig_replicas", "500"}, {"fig_lo", "5.5"}, {"fig_hi", "7.0"}},
       run_iid_gumbel},
      {"brw-leading", "logcor-recentering", "mean BRW maximum against m_n",
       {{"ns", "16,20,24"}, {"sigma2", "1"}, {"replicas", "200"}, {"tolerance", "2"}},
       run_brw_leading},
      {"brw-subleading", "brw-subleading-order", "slope of mean(BRW max) - mean(IID max) against log n",
       {{"ns", "12,16,20,24"}, {"sigma2", "1"}, {"replicas", "2000"}, {"slope_lo", "-1.8"}, {"slope_hi", "-0.4"}},
       run_brw_subleading},
      {"brw-entropy", "entropy-high-points", "single-sample entropy of high points against log 2 - E^2/(2 sigma2)",
       {{"n", "20"}, {"sigma2", "1"}, {"replicas", "1"}, {"e_fractions", "0,0.25,0.5,0.75"}, {"rel_tol", "0.05"},
        {"abs_tol_high", "0.035"}, {"high_fraction", "0.75"}},
       run_brw_entropy},
      {"brw-free-energy", "free-energy-freezing", "(1/n) log Z_n(beta) against the limit, and frozen flatness",
       {{"n", "20"}, {"sigma2", "1"}, {"replicas", "100"}, {"beta_fractions", "0.25,0.5,0.75,1,1.5,2,3,4"},
        {"check_fractions", "0.5,1,2"}, {"tolerance", "0.1"}, {"flatness_max", "0.15"}, {"flatness_pair", "2,4"}},
       run_brw_free_energy},
      {"brw-kistler", "kistler-multiscale", "fraction of replicas with a positive modified exceedance count",
       {{"n", "20"}, {"sigma2", "1"}, {"K", "4"}, {"eps", "0.05"}, {"e_fraction", "0.5"}, {"replicas", "200"},
        {"min_fraction", "0.95"}},
       run_brw_kistler},
      {"brw-barrier", "barrier-exceedances", "mean exceedance count of m_n under the barrier c l + B",
       {{"n", "16"}, {"sigma2", "1"}, {"replicas", "10000"}, {"barrier", "log-squared"}, {"eps", "0"},
        {"count_lo", "0.01"}, {"count_hi", "100"}},
       run_brw_barrier},
      {"gff-green", "gff-green-function", "spectral vs dense Green function; log-correlation band",
       {{"width", "63"}, {"height", "63"}, {"exact_width", "8"}, {"exact_height", "8"}, {"band", "3"},
        {"exact_tol", "1e-10"}, {"bulk_stride", "1"}},
       run_gff_green},
      {"gff-covariance", "gff-density", "Monte Carlo covariance of the spectral sampler against the Green function",
       {{"width", "8"}, {"height", "8"}, {"replicas", "1000000"}, {"z_max", "5"}},
       run_gff_covariance},
      {"gff-increments", "gff-multiscale", "variances and coupled/decoupled covariances of GFF increments",
       {{"width", "64"}, {"height", "64"}, {"scales", "12"}, {"replicas", "10000"}, {"pair_distances", "4,8,16"},
        {"middle_min_side", "4"}, {"exclusion", "2"}, {"var_lo", "0.15"}, {"var_hi", "0.30"}, {"separation_min", "0.1"}},
       run_gff_increments},
      {"zeta-covariance", "zeta-correlation-estimates", "increment covariances of the random Euler product",
       {{"n", "4"}, {"replicas", "10000"}, {"offsets_log2", "0,1,2,3,4,5"}, {"tolerance", "0.1"}, {"exclusion", "2"},
        {"field_band", "0.5"}},
       run_zeta_covariance},
      {"zeta-variance", "zeta-increment-variance", "block variances of the random Euler product",
       {{"n", "4"}, {"replicas", "10000"}, {"check_scales", "3,4"}, {"tolerance", "0.05"}},
       run_zeta_variance},
      {"cue-moments", "diaconis-shahshahani", "E|Tr U^k|^2 against min(k, N)",
       {{"N", "50"}, {"ks", "1,5,50,70"}, {"replicas", "100000"}, {"sampler", "dense"}, {"rel_tol", "0.05"}},
       run_cue_moments},
      {"cue-variance", "keating-snaith-variance", "Var log|P(theta)| against (1/2) log N",
       {{"N", "1024"}, {"replicas", "1000"}, {"sampler", "verblunsky"}, {"theta", "0"}, {"rel_tol", "0.1"},
        {"remainder_ns", "128,256,512"}, {"remainder_replicas", "1000"}, {"remainder_max", "2"}},
       run_cue_variance},
      {"cue-max", "fhk-unitary", "mean grid maximum of log|P| at two sizes; grid refinement",
       {{"N", "1024"}, {"N_large", "4096"}, {"grid_factor", "16"}, {"replicas", "200"}, {"sampler", "verblunsky"},
        {"max_lo", "5"}, {"max_hi", "7"}, {"ratio_lo", "0.75"}, {"ratio_hi", "0.95"}, {"stability_N", "256"},
        {"stability_max", "0.2"}},
       run_cue_max},
      {"cue-dichotomy", "cue-increment-dichotomy", "variances and covariances of CUE increments",
       {{"N", "512"}, {"replicas", "10000"}, {"sampler", "verblunsky"}, {"offsets_log2", "0,1,2,3,4,5,6,7"},
        {"tolerance", "0.1"}, {"exclusion", "2"}, {"var_rel_tol", "0.1"}},
       run_cue_dichotomy},
      {"ballot-scaling", "ballot-theorem", "n^{3/2}-scaled ballot probability across doublings of n",
       {{"ns", "64,128,256"}, {"sigma2", "1"}, {"B", "1"}, {"b", "0"}, {"delta", "1"}, {"replicas", "10000000"},
        {"ratio_lo", "0.7"}, {"ratio_hi", "1.4"}, {"constant_spread_max", "2"}},
       run_ballot_scaling},
  };
  return entries;
}

inline std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.name);
  return out;
}

inline const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  std::string known;
  for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
  throw DomainError("unknown experiment '" + name + "'; registry: " + known);
}

/// Defaults of `name` with `seed = 1` and `threads = 0`, overridden by `overrides`.
inline Config resolve_config(const Experiment& e, const Config& overrides) {
  Config cfg;
  cfg.set("seed", "1");
  cfg.set("threads", "0");
  for (const auto& [k, v] : e.defaults) cfg.set(k, v);
  std::set<std::string> known;
  for (const auto& [k, v] : cfg.entries()) known.insert(k);
  overrides.require_known(known);
  cfg.merge(overrides);
  return cfg;
}

inline ExperimentResult run_experiment(const std::string& name, const Config& overrides = {}) {
  const auto& e = find_experiment(name);
  const Config cfg = resolve_config(e, overrides);
  const auto t = cfg.integer("threads");
  detail::require(t >= 0, "threads must be non-negative");
  Context ctx(e.name, e.citation, cfg, cfg.u64("seed"), t == 0 ? default_threads() : static_cast<unsigned>(t));
  e.body(ctx);
  return std::move(ctx.result());
}

/// Writes <name>.jsonl, <name>_summary.csv, <name>_checks.csv and one
/// <name>_<series>.csv per plot series into `dir`.
inline std::vector<std::filesystem::path> write_outputs(const std::string& name, const ExperimentResult& res,
                                                        const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto open = [&](const std::string& file) {
    written.push_back(dir / file);
    std::ofstream os(written.back(), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + written.back().string());
    return os;
  };
  {
    auto os = open(name + ".jsonl");
    write_jsonl(os, res);
  }
  {
    auto os = open(name + "_summary.csv");
    write_summary_csv(os, res);
  }
  {
    auto os = open(name + "_checks.csv");
    write_checks_csv(os, res);
  }
  for (const auto& [series, rows] : res.plots) {
    std::string file = series;
    std::replace_if(file.begin(), file.end(), [](unsigned char ch) { return !std::isalnum(ch) && ch != '-' && ch != '.'; }, '_');
    auto os = open(name + "_" + file + ".csv");
    write_plot_csv(os, rows);
  }
  return written;
}

}  // namespace logcor::exp
