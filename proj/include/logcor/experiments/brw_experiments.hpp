#pragma once

// IID reference, branching random walk and ballot experiments.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "logcor/brw.hpp"
#include "logcor/experiments/context.hpp"
#include "logcor/iid.hpp"
#include "logcor/stats.hpp"
#include "logcor/theory.hpp"

namespace logcor::exp {

/// Maximum of 2^n explicit IID N(0, var) draws, without storing them.
inline double iid_explicit_max(int n, double var, std::uint64_t seed) {
  detail::require_capacity(n <= iid::kMaxExplicitLevels, "iid: n too large for explicit sampling");
  CounterRng rng(seed, 0);
  const double sd = std::sqrt(var);
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) best = std::max(best, standard_normal(rng));
  return sd * best;
}

inline void run_iid_gumbel(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int n = static_cast<int>(cfg.integer("n"));
  const double sigma2 = cfg.real("sigma2");
  const auto replicas = ctx.replicas();
  const int fn = static_cast<int>(cfg.integer("fig_n"));
  const double fs2 = cfg.real("fig_sigma2");
  const auto freps = ctx.replicas("fig_replicas");
  const bool explicit_max = cfg.str("method") == "explicit";
  detail::require(explicit_max || cfg.str("method") == "order-statistic", "method must be explicit or order-statistic");
  theory::TheoryParams tp(sigma2, n);

  auto draw = [&](int nn, double s2, std::uint64_t seed) {
    return explicit_max ? iid_explicit_max(nn, s2 * nn, seed) : iid::sample_max(nn, s2, seed);
  };
  const auto maxima = ctx.map_replicas<double>(replicas, [&](std::size_t r) { return draw(n, sigma2, ctx.replica(n, r)); });
  const auto centering = theory::iid_centering(n, sigma2);
  const double c = tp.velocity();
  const auto dist = stats::max_distribution(maxima, centering.a_n, centering.b_n, c, centering.C);
  ctx.report("mean_max", stats::mean_se(maxima), replicas, centering.a_n);
  ctx.report("median_max", stats::median(maxima), 0.0, replicas, centering.a_n);
  ctx.report("ks_distance", dist.ks, 0.0, replicas, 0.0);
  for (std::size_t i = 0; i < dist.x.size(); ++i)
    ctx.plot("ecdf", {dist.x[i], dist.ecdf[i], 0.0, theory::gumbel_cdf(dist.x[i], c, centering.C)});
  ctx.check("gumbel_ks", dist.ks, 0.0, cfg.real("ks_max"), "n=" + std::to_string(n));

  const auto fig = ctx.map_replicas<double>(freps, [&](std::size_t r) { return draw(fn, fs2, ctx.replica(1000 + fn, r)); });
  const auto fm = stats::mean_se(fig);
  ctx.report("figure_mean_max", fm, freps, theory::iid_centering(fn, fs2).a_n);
  ctx.check("figure_mean_max", fm.value, cfg.real("fig_lo"), cfg.real("fig_hi"), "2^" + std::to_string(fn) + " variables");
}

inline std::vector<double> brw_maxima(Context& ctx, int n, double sigma2, std::uint64_t replicas, std::uint64_t tag) {
  return ctx.map_replicas<double>(replicas, [&](std::size_t r) {
    return brw::sample_max({n, sigma2, ctx.replica(tag, r)}).value;
  });
}

inline void run_brw_leading(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto ns = cfg.integers("ns");
  const double sigma2 = cfg.real("sigma2");
  const auto replicas = ctx.replicas();
  const double tol = cfg.real("tolerance");
  for (auto n : ns) brw::BrwConfig{static_cast<int>(n), sigma2, 0}.validate();
  const double c = theory::velocity(sigma2);
  for (auto n64 : ns) {
    const int n = static_cast<int>(n64);
    const auto m = brw_maxima(ctx, n, sigma2, replicas, n);
    const double mn = theory::logcor_centering(n, sigma2);
    const auto est = stats::mean_se(m);
    const std::string tag = "n" + std::to_string(n);
    ctx.report("mean_max_" + tag, est, replicas, mn);
    ctx.report("median_max_" + tag, stats::median(m), 0.0, replicas, mn);
    ctx.report("mean_max_over_n_" + tag, est.value / n, est.se / n, replicas, c);
    if (m.size() >= 100) {
      const auto ic = theory::iid_centering(n, sigma2);
      ctx.report("ks_vs_iid_gumbel_" + tag, stats::max_distribution(m, ic.a_n, 1.0, c, ic.C).ks, 0.0, replicas);
    }
    ctx.plot("mean_max", {static_cast<double>(n), est.value, est.se, mn});
    ctx.check("mean_max_" + tag, est.value, mn - tol, mn + tol);
  }
}

inline void run_brw_subleading(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto ns = cfg.integers("ns");
  const double sigma2 = cfg.real("sigma2");
  const auto replicas = ctx.replicas();
  detail::require(ns.size() >= 3, "ns needs at least three depths");
  for (auto n : ns) brw::BrwConfig{static_cast<int>(n), sigma2, 0}.validate();
  const double c = theory::velocity(sigma2);
  const double unit = sigma2 / c;

  std::vector<std::pair<int, double>> brw_pts, iid_pts;
  std::vector<double> x, diff, diff_se;
  for (auto n64 : ns) {
    const int n = static_cast<int>(n64);
    const auto b = brw_maxima(ctx, n, sigma2, replicas, n);
    const auto i = ctx.map_replicas<double>(replicas, [&](std::size_t r) {
      return iid::sample_max(n, sigma2, ctx.replica(1000 + n, r));
    });
    const auto be = stats::mean_se(b), ie = stats::mean_se(i);
    const std::string tag = "n" + std::to_string(n);
    ctx.report("brw_mean_max_" + tag, be, replicas, theory::logcor_centering(n, sigma2));
    ctx.report("iid_mean_max_" + tag, ie, replicas, theory::iid_centering(n, sigma2).a_n);
    brw_pts.emplace_back(n, be.value);
    iid_pts.emplace_back(n, ie.value);
    x.push_back(std::log(static_cast<double>(n)));
    diff.push_back(be.value - ie.value);
    diff_se.push_back(std::hypot(be.se, ie.se));
    ctx.plot("max_difference", {static_cast<double>(n), diff.back(), diff_se.back(), -unit * x.back()});
  }
  // slope = sum_i w_i d_i with w_i = (x_i - mean x) / Sxx
  const double mx = stats::mean(x);
  double sxx = 0.0;
  for (double v : x) sxx += (v - mx) * (v - mx);
  double slope = 0.0, var = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double w = (x[k] - mx) / sxx;
    slope += w * diff[k];
    var += w * w * diff_se[k] * diff_se[k];
  }
  ctx.report("difference_slope_in_units", slope / unit, std::sqrt(var) / unit, replicas, -1.0);
  ctx.report("brw_subleading_slope_in_units", stats::subleading_fit(brw_pts, c) / unit, 0.0, replicas, -1.5);
  ctx.report("iid_subleading_slope_in_units", stats::subleading_fit(iid_pts, c) / unit, 0.0, replicas, -0.5);
  ctx.check("difference_slope_in_units", slope / unit, cfg.real("slope_lo"), cfg.real("slope_hi"));
}

inline void run_brw_entropy(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int n = static_cast<int>(cfg.integer("n"));
  const double sigma2 = cfg.real("sigma2");
  const auto replicas = ctx.replicas();
  const auto fractions = cfg.reals("e_fractions");
  const double rel = cfg.real("rel_tol");
  const double abs_tol = cfg.real("abs_tol_high");
  const double high = cfg.real("high_fraction");
  brw::BrwConfig{n, sigma2, 0}.validate();
  for (double f : fractions) detail::require(f >= 0.0, "e_fractions must be non-negative");
  detail::require_capacity(n <= brw::kMaxMaterializedDepth, "n too large to materialize");
  const double c = theory::velocity(sigma2);

  // est[r][k] = entropy estimate of replica r at fraction k
  const auto est = ctx.map_replicas<std::vector<double>>(replicas, [&](std::size_t r) {
    const auto f = brw::sample_field({n, sigma2, ctx.replica(n, r)});
    std::vector<double> out;
    for (double fr : fractions) out.push_back(stats::entropy_estimate(f.values, fr * c, n).value);
    return out;
  });
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    std::vector<double> col;
    for (const auto& row : est) col.push_back(row[k]);
    const double E = fractions[k] * c;
    const double S = theory::entropy_curve(E, sigma2);
    const auto e = replicas >= 2 ? stats::mean_se(col) : stats::Estimate{col[0], 0.0};
    const std::string tag = "E_over_c=" + fmt(fractions[k]);
    ctx.report("entropy_" + tag, e, replicas, S);
    ctx.plot("entropy", {E, e.value, e.se, S});
    const double tol = fractions[k] >= high ? abs_tol : rel * S;
    ctx.check("entropy_" + tag, e.value, S - tol, S + tol);
  }
}

inline void run_brw_free_energy(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int n = static_cast<int>(cfg.integer("n"));
  const double sigma2 = cfg.real("sigma2");
  const auto replicas = ctx.replicas();
  const auto fractions = cfg.reals("beta_fractions");
  const auto checked = cfg.reals("check_fractions");
  const double tol = cfg.real("tolerance");
  const double flat_max = cfg.real("flatness_max");
  brw::BrwConfig{n, sigma2, 0}.validate();
  detail::require_capacity(n <= brw::kMaxMaterializedDepth, "n too large to materialize");
  for (double f : fractions) detail::require(f > 0.0, "beta_fractions must be positive");
  const double bc = theory::beta_c(sigma2);

  // (1/n) log Z_n(beta) per replica and beta
  const auto lz = ctx.map_replicas<std::vector<double>>(replicas, [&](std::size_t r) {
    const auto f = brw::sample_field({n, sigma2, ctx.replica(n, r)});
    std::vector<double> out;
    for (double fr : fractions) out.push_back(stats::log_partition(f.values, fr * bc) / n);
    return out;
  });
  std::vector<stats::Estimate> per_beta;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    std::vector<double> col, normalized;
    const double beta = fractions[k] * bc;
    for (const auto& row : lz) {
      col.push_back(row[k]);
      normalized.push_back(row[k] / beta);
    }
    const auto e = replicas >= 2 ? stats::mean_se(col) : stats::Estimate{col[0], 0.0};
    const auto en = replicas >= 2 ? stats::mean_se(normalized) : stats::Estimate{normalized[0], 0.0};
    per_beta.push_back(en);
    const double f = theory::free_energy_limit(beta, sigma2);
    const std::string tag = "beta_over_beta_c=" + fmt(fractions[k]);
    ctx.report("log_partition_per_n_" + tag, e, replicas, f);
    ctx.report("free_energy_" + tag, en, replicas, f / beta);
    ctx.plot("log_partition_per_n", {beta, e.value, e.se, f});
    for (double cf : checked)
      if (cf == fractions[k]) ctx.check("log_partition_per_n_" + tag, e.value, f - tol, f + tol);
  }
  // flatness of the frozen branch: f_n(2 beta_c) - f_n(4 beta_c) for f_n = (1/(beta n)) log Z
  const auto flat = cfg.reals("flatness_pair");
  detail::require(flat.size() == 2, "flatness_pair needs two fractions");
  int i0 = -1, i1 = -1;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    if (fractions[k] == flat[0]) i0 = static_cast<int>(k);
    if (fractions[k] == flat[1]) i1 = static_cast<int>(k);
  }
  detail::require(i0 >= 0 && i1 >= 0, "flatness_pair must be listed in beta_fractions");
  const double gap = per_beta[i0].value - per_beta[i1].value;
  ctx.report("frozen_flatness", gap, std::hypot(per_beta[i0].se, per_beta[i1].se), replicas, 0.0);
  ctx.check("frozen_flatness", gap, -INFINITY, flat_max);
}

inline void run_brw_kistler(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int n = static_cast<int>(cfg.integer("n"));
  const double sigma2 = cfg.real("sigma2");
  const int K = static_cast<int>(cfg.integer("K"));
  const double eps = cfg.real("eps");
  const double E = cfg.real("e_fraction") * theory::velocity(sigma2);
  const auto replicas = ctx.replicas();
  brw::BrwConfig{n, sigma2, 0}.validate();
  const stats::KistlerEvent ev(n, K, E, eps);
  const double plain_level = (1.0 + eps) * (1.0 - 1.0 / K) * E * n;

  const auto counts = ctx.map_replicas<std::pair<double, double>>(replicas, [&](std::size_t r) {
    std::uint64_t k = 0, plain = 0;
    for (brw::LeafStream s({n, sigma2, ctx.replica(n, r)}); !s.done(); s.advance()) {
      const auto path = s.path();
      k += ev.from_prefixes(path);
      plain += (path.back() - path[static_cast<std::size_t>(n / K - 1)]) > plain_level;
    }
    return std::pair<double, double>(static_cast<double>(k), static_cast<double>(plain));
  });
  std::vector<double> k, positive, plain;
  for (const auto& [a, b] : counts) {
    k.push_back(a);
    positive.push_back(a > 0 ? 1.0 : 0.0);
    plain.push_back(b);
  }
  ctx.report("mean_kistler_count", stats::mean_se(k), replicas);
  ctx.report("mean_block_exceedance_count", stats::mean_se(plain), replicas);
  const auto pos = stats::mean_se(positive);
  ctx.report("fraction_positive", pos, replicas, 1.0);
  ctx.check("fraction_positive", pos.value, cfg.real("min_fraction"), 1.0);
}

inline void run_brw_barrier(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const int n = static_cast<int>(cfg.integer("n"));
  const double sigma2 = cfg.real("sigma2");
  const auto replicas = ctx.replicas();
  brw::BrwConfig{n, sigma2, 0}.validate();
  const std::string bs = cfg.str("barrier");
  const double B = bs == "log-squared" ? std::pow(std::log(static_cast<double>(n)), 2)
                   : bs == "inf"       ? INFINITY
                                       : cfg.real("barrier");
  const double level = theory::logcor_centering(n, sigma2, cfg.real("eps"));
  const stats::BarrierEvent ev(theory::velocity(sigma2), B, level);

  const auto counts = ctx.map_replicas<std::pair<double, double>>(replicas, [&](std::size_t r) {
    std::uint64_t k = 0, plain = 0;
    for (brw::LeafStream s({n, sigma2, ctx.replica(n, r)}); !s.done(); s.advance()) {
      k += ev(s.path());
      plain += s.value() > level;
    }
    return std::pair<double, double>(static_cast<double>(k), static_cast<double>(plain));
  });
  std::vector<double> k, plain;
  for (const auto& [a, b] : counts) {
    k.push_back(a);
    plain.push_back(b);
  }
  const auto e = stats::mean_se(k);
  ctx.report("mean_barrier_count", e, replicas);
  ctx.report("mean_exceedance_count", stats::mean_se(plain), replicas);
  ctx.report("barrier", B, 0.0, replicas);
  ctx.check("mean_barrier_count", e.value, cfg.real("count_lo"), cfg.real("count_hi"));
}

inline void run_ballot_scaling(Context& ctx) {
  const auto& cfg = ctx.cfg();
  const auto ns = cfg.integers("ns");
  stats::BallotParams base;
  base.sigma2 = cfg.real("sigma2");
  base.B = cfg.real("B");
  base.b = cfg.real("b");
  base.delta = cfg.real("delta");
  base.replicas = ctx.replicas();
  for (auto n : ns) {
    auto p = base;
    p.n_steps = static_cast<int>(n);
    p.validate();
  }
  std::vector<double> scaled, cs;
  std::vector<stats::Estimate> ests;
  for (auto n64 : ns) {
    auto p = base;
    p.n_steps = static_cast<int>(n64);
    p.seed = ctx.design_seed(static_cast<std::uint64_t>(n64));
    const auto e = stats::ballot_mc(p, ctx.threads());
    const double n15 = std::pow(static_cast<double>(n64), 1.5);
    const std::string tag = "n" + std::to_string(n64);
    ctx.report("probability_" + tag, e, p.replicas);
    ctx.report("scaled_probability_" + tag, e.value * n15, e.se * n15, p.replicas);
    const double C = e.value * n15 / ((1.0 + p.B) * (1.0 + p.B - p.b));
    ctx.report("ballot_constant_" + tag, C, e.se * C / std::max(e.value, 1e-300), p.replicas);
    ctx.plot("scaled_probability", {static_cast<double>(n64), e.value * n15, e.se * n15, NAN});
    ests.push_back(e);
    scaled.push_back(e.value * n15);
    cs.push_back(C);
  }
  for (std::size_t i = 0; i < ns.size(); ++i)
    for (std::size_t j = 0; j < ns.size(); ++j)
      if (ns[j] == 2 * ns[i]) {
        const double ratio = scaled[j] / scaled[i];
        const std::string tag = std::to_string(ns[i]) + "_to_" + std::to_string(ns[j]);
        ctx.report("scaled_ratio_" + tag, ratio, 0.0, base.replicas, 1.0);
        ctx.check("scaled_ratio_" + tag, ratio, cfg.real("ratio_lo"), cfg.real("ratio_hi"));
      }
  const double spread = *std::max_element(cs.begin(), cs.end()) / *std::min_element(cs.begin(), cs.end());
  ctx.report("ballot_constant_spread", spread, 0.0, base.replicas, 1.0);
  ctx.check("ballot_constant_spread", spread, 1.0, cfg.real("constant_spread_max"));
}

}  // namespace logcor::exp
