#pragma once

// Gaussian free field experiments.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "logcor/experiments/context.hpp"
#include "logcor/gff.hpp"
#include "logcor/stats.hpp"

namespace logcor::exp {

inline gff::BoxRegion config_box(const Config& cfg, const std::string& w, const std::string& h) {
  gff::BoxRegion b{static_cast<int>(cfg.integer(w)), static_cast<int>(cfg.integer(h)), 0, 0};
  b.validate();
  return b;
}

inline void run_gff_green(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto box = config_box(cfg, "width", "height");
  const auto small = config_box(cfg, "exact_width", "exact_height");
  const double band = cfg.real("band");
  detail::require_capacity(box.size() <= gff::kMaxGreenSites, "box too large for the dense Green solve");
  detail::require_capacity(small.size() <= gff::kMaxDenseSamplerSites, "exact box too large");

  const double diff = (gff::SpectralSampler(small).covariance() - gff::green(small).matrix()).cwiseAbs().maxCoeff();
  ctx.report("spectral_vs_dense_max_abs_diff", diff, 0.0, 1, 0.0);
  ctx.check("spectral_vs_dense_max_abs_diff", diff, 0.0, cfg.real("exact_tol"));

  const auto g = gff::green(box);
  const double sites = static_cast<double>(box.size());
  const gff::Site c = box.center();
  const double diag = g(c, c) - std::log(sites) / std::numbers::pi;
  ctx.report("center_diag_minus_log", diag, 0.0, 1);
  ctx.check("center_diag_minus_log", diag, -band, band);

  // Bulk: both coordinates at least side/4 away from the boundary; pairs at distance <= side/4.
  const double reach = std::min(box.width, box.height) / 4.0;
  const auto bulk = [&](gff::Site s) {
    return s.x >= reach - 1 && s.x <= box.width - reach && s.y >= reach - 1 && s.y <= box.height - reach;
  };
  const int stride = static_cast<int>(cfg.integer("bulk_stride"));
  detail::require(stride >= 1, "bulk_stride must be positive");
  double lo = INFINITY, hi = -INFINITY;
  std::uint64_t pairs = 0;
  for (int y = 0; y < box.height; y += stride)
    for (int x = 0; x < box.width; x += stride) {
      const gff::Site v{x, y};
      if (!bulk(v)) continue;
      for (std::size_t i = 0; i < box.size(); ++i) {
        const gff::Site w = box.site(i);
        const double d = gff::distance(v, w);
        if (d == 0.0 || d > reach || !bulk(w)) continue;
        const double q = g(v, w) + std::log(d * d / sites) / std::numbers::pi;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
        ++pairs;
      }
    }
  ctx.report("log_correlation_min", lo, 0.0, pairs);
  ctx.report("log_correlation_max", hi, 0.0, pairs);
  ctx.check("log_correlation_min", lo, -band, band);
  ctx.check("log_correlation_max", hi, -band, band);
  for (int k = 1; k <= static_cast<int>(reach); ++k) {
    const gff::Site w{c.x + k, c.y};
    ctx.plot("green_vs_distance", {static_cast<double>(k), g(c, w), 0.0, std::log(sites / (k * k)) / std::numbers::pi});
  }
}

inline void run_gff_covariance(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto box = config_box(cfg, "width", "height");
  const auto replicas = ctx.replicas();
  detail::require_capacity(box.size() <= gff::kMaxDenseSamplerSites, "box too large for the covariance study");
  const gff::SpectralSampler sampler(box);
  const auto g = gff::green(box);
  const auto m = static_cast<Eigen::Index>(box.size());

  constexpr std::uint64_t kBatch = 4096;
  const std::uint64_t batches = (replicas + kBatch - 1) / kBatch;
  struct Acc {
    Eigen::MatrixXd xx, x2x2;
    Eigen::VectorXd sum;
  };
  // Known zero mean: E[x_i x_j] is estimated by the mean of products.
  const auto parts = ctx.map_replicas<Acc>(batches, [&](std::size_t b) {
    const std::uint64_t lo = b * kBatch, hi = std::min(replicas, lo + kBatch);
    Eigen::MatrixXd x(m, static_cast<Eigen::Index>(hi - lo));
    for (std::uint64_t r = lo; r < hi; ++r) {
      const auto f = sampler.sample(ctx.replica(0, r));
      x.col(static_cast<Eigen::Index>(r - lo)) = Eigen::Map<const Eigen::VectorXd>(f.values.data(), m);
    }
    const Eigen::MatrixXd sq = x.cwiseProduct(x);
    return Acc{x * x.transpose(), sq * sq.transpose(), x.rowwise().sum()};
  });
  Eigen::MatrixXd xx = Eigen::MatrixXd::Zero(m, m), x2x2 = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
  for (const auto& p : parts) {
    xx += p.xx;
    x2x2 += p.x2x2;
    sum += p.sum;
  }
  const double R = static_cast<double>(replicas);
  const Eigen::MatrixXd cov = xx / R;
  double max_z = 0.0, max_mean_z = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double var = x2x2(i, j) / R - cov(i, j) * cov(i, j);
      const double se = std::sqrt(std::max(var, 0.0) / R);
      max_z = std::max(max_z, std::abs(cov(i, j) - g.matrix()(i, j)) / se);
    }
    max_mean_z = std::max(max_mean_z, std::abs(sum[i] / R) / std::sqrt(cov(i, i) / R));
  }
  ctx.report("max_covariance_z_score", max_z, 0.0, replicas, 0.0);
  ctx.report("max_mean_z_score", max_mean_z, 0.0, replicas, 0.0);
  const gff::Site c = box.center();
  const auto ci = static_cast<Eigen::Index>(box.index(c));
  for (int k = 0; k < box.width - c.x; ++k) {
    const auto wi = static_cast<Eigen::Index>(box.index({c.x + k, c.y}));
    ctx.plot("covariance_from_center", {static_cast<double>(k), cov(ci, wi), 0.0, g.matrix()(ci, wi)});
  }
  ctx.check("max_covariance_z_score", max_z, 0.0, cfg.real("z_max"));
}

inline void run_gff_increments(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto box = config_box(cfg, "width", "height");
  const int n = static_cast<int>(cfg.integer("scales"));
  const auto replicas = ctx.replicas();
  const auto distances = cfg.integers("pair_distances");
  const int min_side = static_cast<int>(cfg.integer("middle_min_side"));
  const int zone = static_cast<int>(cfg.integer("exclusion"));
  detail::require(n >= 2, "scales must be at least 2");
  const gff::Site v = box.center();
  std::vector<gff::IncrementPlan> plans{gff::IncrementPlan(box, v, n)};
  std::vector<int> branch;
  for (auto d : distances) {
    const gff::Site w{v.x + static_cast<int>(d), v.y};
    detail::require(box.contains(w), "pair distance leaves the box");
    plans.emplace_back(box, w, n);
    branch.push_back(gff::branching_scale(box, v, w, n));
  }
  const gff::SpectralSampler sampler(box);
  // y[r][p][l-1]
  const auto y = ctx.map_replicas<std::vector<std::vector<double>>>(replicas, [&](std::size_t r) {
    const auto f = sampler.sample(ctx.replica(0, r));
    std::vector<std::vector<double>> out;
    for (const auto& p : plans) out.push_back(p.increments(f));
    return out;
  });
  const auto column = [&](std::size_t p, int l) {
    std::vector<double> c;
    c.reserve(y.size());
    for (const auto& row : y) c.push_back(row[p][static_cast<std::size_t>(l - 1)]);
    return c;
  };
  const double target = std::numbers::ln2 / std::numbers::pi;
  for (int l = 1; l <= n; ++l) {
    const auto e = stats::variance_se(column(0, l));
    const std::string tag = "l" + std::to_string(l);
    ctx.report("variance_" + tag, e, replicas, target);
    ctx.plot("variance", {static_cast<double>(l), e.value, e.se, target});
    // middle scales: not the first, and both nested squares at least min_side wide
    const bool middle = l >= 2 && plans[0].region(l).width >= min_side && plans[0].region(l).height >= min_side &&
                        !plans[0].clipped(l) && !plans[0].clipped(l - 1);
    if (middle) ctx.check("variance_" + tag, e.value, cfg.real("var_lo"), cfg.real("var_hi"));
  }
  for (std::size_t k = 0; k < distances.size(); ++k) {
    const int b = branch[k];
    const std::string pair = "d" + std::to_string(distances[k]);
    ctx.report("branching_scale_" + pair, b, 0.0, 1);
    std::vector<double> coupled, decoupled;
    for (int l = 1; l <= n; ++l) {
      const auto e = stats::covariance(column(0, l), column(k + 1, l));
      const double pred = l <= b - zone ? target : l >= b + zone ? 0.0 : NAN;
      ctx.report("covariance_" + pair + "_l" + std::to_string(l), e, replicas, pred);
      ctx.plot("covariance_" + pair, {static_cast<double>(l), e.value, e.se, pred});
      if (l <= b - zone) coupled.push_back(e.value);
      if (l >= b + zone) decoupled.push_back(e.value);
    }
    if (coupled.empty() || decoupled.empty()) continue;
    const double sep = stats::mean(coupled) - stats::mean(decoupled);
    ctx.report("separation_" + pair, sep, 0.0, replicas, target);
    ctx.check("separation_" + pair, sep, cfg.real("separation_min"), INFINITY,
              "mean coupled minus mean decoupled covariance");
  }
}

}  // namespace logcor::exp
