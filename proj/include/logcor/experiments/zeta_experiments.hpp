#pragma once

// Random Euler-product experiments.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "logcor/experiments/context.hpp"
#include "logcor/stats.hpp"
#include "logcor/zeta.hpp"

namespace logcor::exp {

/// inc[r][k][l-1] = Y_{h_k}(l) for replica r.
inline std::vector<std::vector<std::vector<double>>> zeta_increments(Context& ctx, const zeta::ZetaModel& model,
                                                                     const std::vector<double>& shifts,
                                                                     std::uint64_t replicas) {
  const zeta::ShiftedIncrements table(model, shifts);
  return ctx.map_replicas<std::vector<std::vector<double>>>(
      replicas, [&](std::size_t r) { return table.evaluate(model.sample_phases(ctx.replica(0, r))); });
}

/// Exact E[Y_h(l) Y_h'(l)] = (1/2) sum_{p in block l} cos(dh log p) / p.
inline double zeta_exact_covariance(const zeta::ZetaModel& model, int l, double dh) {
  const auto& b = model.block(l);
  double acc = 0.0;
  for (std::size_t i = b.begin; i < b.end; ++i) {
    const double w = model.inv_sqrt_primes()[i];
    acc += w * w * std::cos(dh * model.log_primes()[i]);
  }
  return 0.5 * acc;
}

inline void run_zeta_variance(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int n = static_cast<int>(cfg.integer("n"));
  const auto replicas = ctx.replicas();
  const auto checked = cfg.integers("check_scales");
  const double tol = cfg.real("tolerance");
  zeta::dyadic_cutoff(n);
  const zeta::ZetaModel model(n);
  const std::vector<double> shifts{0.0, 0.5};
  const auto inc = zeta_increments(ctx, model, shifts, replicas);
  const double target = 0.5 * std::numbers::ln2;
  ctx.report("prime_count", static_cast<double>(model.prime_count()), 0.0, 1);
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    std::vector<double> field(replicas, 0.0);
    for (std::uint64_t r = 0; r < replicas; ++r)
      for (double y : inc[r][k]) field[r] += y;
    ctx.report("field_variance_h=" + fmt(shifts[k]), stats::variance_se(field), replicas, model.field_variance());
  }
  for (int l = 1; l <= n; ++l) {
    std::vector<double> col;
    for (const auto& row : inc) col.push_back(row[0][static_cast<std::size_t>(l - 1)]);
    const auto e = stats::variance_se(col);
    const std::string tag = "l" + std::to_string(l);
    ctx.report("block_variance_" + tag, e, replicas, model.block_variance(l));
    ctx.report("block_half_reciprocal_sum_" + tag, model.block_variance(l), 0.0, 1, target);
    ctx.report("block_mean_" + tag, stats::mean_se(col), replicas, 0.0);
    ctx.plot("block_variance", {static_cast<double>(l), e.value, e.se, target});
    for (auto cl : checked)
      if (cl == l) ctx.check("block_variance_" + tag, e.value, target - tol, target + tol);
  }
}

inline void run_zeta_covariance(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int n = static_cast<int>(cfg.integer("n"));
  const auto replicas = ctx.replicas();
  const auto js = cfg.integers("offsets_log2");
  const double tol = cfg.real("tolerance");
  const int zone = static_cast<int>(cfg.integer("exclusion"));
  zeta::dyadic_cutoff(n);
  const zeta::ZetaModel model(n);
  std::vector<double> shifts{0.0};
  for (auto j : js) shifts.push_back(std::ldexp(1.0, -static_cast<int>(j)));
  const auto inc = zeta_increments(ctx, model, shifts, replicas);
  const auto column = [&](std::size_t k, int l) {
    std::vector<double> c;
    for (const auto& row : inc) c.push_back(row[k][static_cast<std::size_t>(l - 1)]);
    return c;
  };
  const auto field = [&](std::size_t k) {
    std::vector<double> c;
    for (const auto& row : inc) {
      double x = 0.0;
      for (double y : row[k]) x += y;
      c.push_back(x);
    }
    return c;
  };
  const double half_log2 = 0.5 * std::numbers::ln2;
  for (std::size_t k = 1; k < shifts.size(); ++k) {
    const double wedge = zeta::branching_scale(0.0, shifts[k]).value;
    const std::string pair = "dh=2^-" + std::to_string(js[k - 1]);
    for (int l = 1; l <= n; ++l) {
      const auto e = stats::covariance(column(0, l), column(k, l));
      const auto pred = zeta::increment_covariance_pred(l, 0.0, shifts[k]);
      const std::string tag = "covariance_" + pair + "_l" + std::to_string(l);
      ctx.report(tag, e, replicas, pred.value);
      ctx.report("exact_" + tag, zeta_exact_covariance(model, l, shifts[k]), 0.0, 1, pred.value);
      ctx.plot("covariance_" + pair, {static_cast<double>(l), e.value, e.se, pred.value});
      if (std::abs(l - wedge) >= zone) ctx.check(tag, e.value, pred.value - tol, pred.value + tol, zeta::to_string(pred.regime));
    }
    const auto fe = stats::covariance(field(0), field(k));
    ctx.report("field_covariance_" + pair, fe, replicas, half_log2 * wedge);
    ctx.plot("field_covariance", {wedge, fe.value, fe.se, half_log2 * wedge});
    if (wedge >= 1 && wedge <= n - 1)
      ctx.check("field_covariance_" + pair, fe.value, half_log2 * wedge - cfg.real("field_band"),
                half_log2 * wedge + cfg.real("field_band"));
  }
}

}  // namespace logcor::exp
