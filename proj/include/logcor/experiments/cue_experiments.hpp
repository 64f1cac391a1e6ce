#pragma once

// Circular unitary ensemble experiments.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "logcor/cue.hpp"
#include "logcor/experiments/context.hpp"
#include "logcor/stats.hpp"
#include "logcor/theory.hpp"

namespace logcor::exp {

inline bool use_dense(const Config& cfg) {
  const std::string s = cfg.str("sampler");
  detail::require(s == "dense" || s == "verblunsky", "sampler must be dense or verblunsky");
  return s == "dense";
}

/// Characteristic polynomial of one CUE(N) draw from the chosen sampler.
inline cue::CharPoly cue_charpoly(bool dense, int N, std::uint64_t seed) {
  return dense ? cue::CharPoly::from_angles(cue::sample_haar(N, seed))
               : cue::CharPoly::from_verblunsky(cue::sample_verblunsky(N, seed));
}

/// Exact Var log|P(theta)| for CUE(N): (1/2) sum_k min(k, N) / k^2.
inline double cue_log_variance(int N) {
  double acc = 0.0;
  for (int k = 1; k <= N; ++k) acc += 1.0 / k;
  // N sum_{k > N} 1/k^2, with an Euler-Maclaurin tail
  const double tail = 1.0 / N - 0.5 / (static_cast<double>(N) * N) + 1.0 / (6.0 * N * static_cast<double>(N) * N);
  return 0.5 * (acc + N * tail);
}

/// Exact E[Y_theta(l) Y_theta'(l)] = (1/2) sum_{2^{l-1} < k <= 2^l} min(k, N) cos(k d) / k^2.
inline double cue_exact_covariance(int N, int l, double d) {
  double acc = 0.0;
  for (int k = (1 << (l - 1)) + 1; k <= (1 << l); ++k)
    acc += std::min(k, N) * std::cos(k * d) / (static_cast<double>(k) * k);
  return 0.5 * acc;
}

inline void run_cue_moments(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int N = static_cast<int>(cfg.integer("N"));
  const auto ks = cfg.integers("ks");
  const auto replicas = ctx.replicas();
  const bool dense = use_dense(cfg);
  detail::require(N >= 2, "N must be at least 2");
  long long kmax = 2;
  for (auto k : ks) {
    detail::require(k >= 1, "ks must be positive");
    kmax = std::max(kmax, k);
  }
  const auto tv = ctx.map_replicas<cue::TraceVector>(replicas, [&](std::size_t r) {
    const auto seed = ctx.replica(0, r);
    if (dense) return cue::traces(cue::sample_haar(N, seed), static_cast<int>(kmax));
    return cue::CharPoly::from_verblunsky(cue::sample_verblunsky(N, seed)).traces(static_cast<int>(kmax));
  });
  const double rel = cfg.real("rel_tol");
  for (auto k : ks) {
    std::vector<double> m2;
    for (const auto& t : tv) m2.push_back(std::norm(t(static_cast<int>(k))));
    const auto e = stats::mean_se(m2);
    const double target = static_cast<double>(std::min<long long>(k, N));
    const std::string tag = "k" + std::to_string(k);
    ctx.report("mean_abs_trace_squared_" + tag, e, replicas, target);
    ctx.plot("trace_moments", {static_cast<double>(k), e.value, e.se, target});
    ctx.check("mean_abs_trace_squared_" + tag, e.value, target * (1 - rel), target * (1 + rel));
  }
  std::vector<double> t1re, t12re, t12im;
  for (const auto& t : tv) {
    t1re.push_back(t(1).real());
    const auto p = t(1) * t(2);
    t12re.push_back(p.real());
    t12im.push_back(p.imag());
  }
  ctx.report("mean_re_trace_1", stats::mean_se(t1re), replicas, 0.0);
  ctx.report("mean_re_trace_1_times_trace_2", stats::mean_se(t12re), replicas, 0.0);
  ctx.report("mean_im_trace_1_times_trace_2", stats::mean_se(t12im), replicas, 0.0);
}

inline void run_cue_variance(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int N = static_cast<int>(cfg.integer("N"));
  const auto replicas = ctx.replicas();
  const bool dense = use_dense(cfg);
  const double theta = cfg.real("theta");
  detail::require(N >= 2, "N must be at least 2");
  const auto vals = ctx.map_replicas<double>(replicas, [&](std::size_t r) {
    const auto seed = ctx.replica(0, r);
    if (dense) return cue::log_charpoly(cue::sample_haar(N, seed), theta);
    return cue::log_charpoly(cue::sample_verblunsky(N, seed), theta);
  });
  const double target = 0.5 * std::log(static_cast<double>(N));
  const auto e = stats::variance_se(vals);
  ctx.report("variance_log_charpoly", e, replicas, target);
  ctx.report("exact_finite_N_variance", cue_log_variance(N), 0.0, 1, target);
  ctx.report("mean_log_charpoly", stats::mean_se(vals), replicas, 0.0);
  const double rel = cfg.real("rel_tol");
  ctx.check("variance_log_charpoly", e.value, target * (1 - rel), target * (1 + rel));

  // remainder log|P| - sum_l Y(l) has bounded variance
  const auto rns = cfg.integers("remainder_ns");
  const auto rreps = ctx.replicas("remainder_replicas");
  for (auto rn : rns) {
    const int M = static_cast<int>(rn);
    detail::require(M >= 2 && (M & (M - 1)) == 0, "remainder_ns must be powers of two");
    const int n = std::countr_zero(static_cast<unsigned>(M));
    const auto rem = ctx.map_replicas<double>(rreps, [&](std::size_t r) {
      const auto s = cue::sample_verblunsky(M, ctx.replica(static_cast<std::uint64_t>(M), r));
      const auto tv = cue::CharPoly::from_verblunsky(s).traces(M);
      double sum = 0.0;
      for (double y : cue::increments(theta, tv, n)) sum += y;
      return cue::log_charpoly(s, theta) - sum;
    });
    const auto re = stats::variance_se(rem);
    const std::string tag = "remainder_variance_N" + std::to_string(M);
    ctx.report(tag, re, rreps);
    ctx.plot("remainder_variance", {static_cast<double>(M), re.value, re.se, NAN});
    ctx.check(tag, re.value, 0.0, cfg.real("remainder_max"));
  }
}

inline void run_cue_max(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int N = static_cast<int>(cfg.integer("N"));
  const int N2 = static_cast<int>(cfg.integer("N_large"));
  const auto mult = static_cast<std::size_t>(cfg.integer("grid_factor"));
  const auto replicas = ctx.replicas();
  const bool dense = use_dense(cfg);
  detail::require(N >= 3 && N2 >= 3 && mult >= 2 && mult % 2 == 0, "need N >= 3 and an even grid_factor");

  const auto grid_max = [&](int n, std::size_t factor, std::uint64_t tag) {
    return ctx.map_replicas<double>(replicas, [&](std::size_t r) {
      return cue_charpoly(dense, n, ctx.replica(tag, r)).field_on_grid(factor * static_cast<std::size_t>(n)).max();
    });
  };
  const auto m1 = grid_max(N, mult, static_cast<std::uint64_t>(N));
  const auto e1 = stats::mean_se(m1);
  ctx.report("mean_grid_max_N" + std::to_string(N), e1, replicas, theory::fhk_prediction(theory::FhkModel::cue, N));
  ctx.report("median_grid_max_N" + std::to_string(N), stats::median(m1), 0.0, replicas);
  ctx.check("mean_grid_max_N" + std::to_string(N), e1.value, cfg.real("max_lo"), cfg.real("max_hi"));

  const auto m2 = grid_max(N2, mult, static_cast<std::uint64_t>(N2));
  const auto e2 = stats::mean_se(m2);
  const double l2 = std::log(static_cast<double>(N2));
  ctx.report("mean_grid_max_N" + std::to_string(N2), e2, replicas, theory::fhk_prediction(theory::FhkModel::cue, N2));
  ctx.report("mean_grid_max_over_log_N" + std::to_string(N2), e2.value / l2, e2.se / l2, replicas,
             theory::fhk_prediction(theory::FhkModel::cue, N2) / l2);
  ctx.check("mean_grid_max_over_log_N" + std::to_string(N2), e2.value / l2, cfg.real("ratio_lo"), cfg.real("ratio_hi"));
  ctx.plot("mean_grid_max", {static_cast<double>(N), e1.value, e1.se, theory::fhk_prediction(theory::FhkModel::cue, N)});
  ctx.plot("mean_grid_max", {static_cast<double>(N2), e2.value, e2.se, theory::fhk_prediction(theory::FhkModel::cue, N2)});

  // grid refinement at a smaller size, same seeds
  const int Ns = static_cast<int>(cfg.integer("stability_N"));
  const auto coarse = grid_max(Ns, mult / 2, 1u << 20);
  const auto fine = grid_max(Ns, mult, 1u << 20);
  const double shift = stats::mean(fine) - stats::mean(coarse);
  ctx.report("grid_refinement_shift_N" + std::to_string(Ns), shift, 0.0, replicas, 0.0);
  ctx.check("grid_refinement_shift_N" + std::to_string(Ns), shift, -cfg.real("stability_max"), cfg.real("stability_max"));
}

inline void run_cue_dichotomy(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int N = static_cast<int>(cfg.integer("N"));
  const auto replicas = ctx.replicas();
  const auto js = cfg.integers("offsets_log2");
  const double tol = cfg.real("tolerance");
  const int zone = static_cast<int>(cfg.integer("exclusion"));
  const bool dense = use_dense(cfg);
  detail::require(N >= 4 && (N & (N - 1)) == 0, "N must be a power of two");
  const int n = std::countr_zero(static_cast<unsigned>(N));
  std::vector<double> thetas{0.0};
  for (auto j : js) thetas.push_back(std::ldexp(1.0, -static_cast<int>(j)));

  // y[r][k][l-1] = Y_{theta_k}(l)
  const auto y = ctx.map_replicas<std::vector<std::vector<double>>>(replicas, [&](std::size_t r) {
    const auto tv = cue_charpoly(dense, N, ctx.replica(0, r)).traces(N);
    std::vector<std::vector<double>> out;
    for (double t : thetas) out.push_back(cue::increments(t, tv, n));
    return out;
  });
  const auto column = [&](std::size_t k, int l) {
    std::vector<double> c;
    for (const auto& row : y) c.push_back(row[k][static_cast<std::size_t>(l - 1)]);
    return c;
  };
  const double target = 0.5 * std::numbers::ln2;
  for (int l = 1; l <= n; ++l) {
    const auto e = stats::variance_se(column(0, l));
    const std::string tag = "variance_l" + std::to_string(l);
    ctx.report(tag, e, replicas, target);
    ctx.plot("variance", {static_cast<double>(l), e.value, e.se, target});
    if (l >= 2 && l <= n - 1) ctx.check(tag, e.value, target * (1 - cfg.real("var_rel_tol")), target * (1 + cfg.real("var_rel_tol")));
  }
  for (std::size_t k = 1; k < thetas.size(); ++k) {
    const double wedge = cue::branching_scale(0.0, thetas[k]).value;
    const std::string pair = "dtheta=2^-" + std::to_string(js[k - 1]);
    for (int l = 1; l <= n; ++l) {
      const auto e = stats::covariance(column(0, l), column(k, l));
      const auto pred = cue::increment_covariance_pred(l, 0.0, thetas[k]);
      const std::string tag = "covariance_" + pair + "_l" + std::to_string(l);
      ctx.report(tag, e, replicas, pred.value);
      ctx.report("exact_" + tag, cue_exact_covariance(N, l, thetas[k]), 0.0, 1, pred.value);
      ctx.plot("covariance_" + pair, {static_cast<double>(l), e.value, e.se, pred.value});
      if (std::abs(l - wedge) >= zone)
        ctx.check(tag, e.value, pred.value - tol, pred.value + tol, pred.coupled ? "coupled" : "decoupled");
    }
  }
}

}  // namespace logcor::exp
