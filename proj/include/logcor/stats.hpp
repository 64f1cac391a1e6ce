#pragma once

// Extreme-value statistics over field samples. Inequalities are strict where
// a level is exceeded ("X > y"); partition sums use a max-shifted log-sum-exp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "logcor/errors.hpp"
#include "logcor/field.hpp"
#include "logcor/parallel.hpp"
#include "logcor/rng.hpp"
#include "logcor/theory.hpp"

namespace logcor::stats {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Basic estimators

/// Pairwise summation in a fixed order (deterministic for a given input).
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

inline double mean(std::span<const double> x) {
  detail::require(!x.empty(), "stats::mean: empty sample");
  return pairwise_sum(x) / static_cast<double>(x.size());
}

/// Unbiased sample variance.
inline double variance(std::span<const double> x) {
  detail::require(x.size() >= 2, "stats::variance: need at least two values");
  const double m = mean(x);
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - m) * (x[i] - m);
  return pairwise_sum(d) / static_cast<double>(x.size() - 1);
}

/// Sample mean with its standard error.
inline Estimate mean_se(std::span<const double> x) {
  const double m = mean(x);
  const double se = x.size() >= 2 ? std::sqrt(variance(x) / static_cast<double>(x.size())) : 0.0;
  return {m, se};
}

inline double median(std::span<const double> x) {
  detail::require(!x.empty(), "stats::median: empty sample");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const std::size_t h = s.size() / 2;
  return s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
}

/// Sample covariance; the SE is the delta-method SE of the mean of centered products.
inline Estimate covariance(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "stats::covariance: need two samples of equal size >= 2");
  const double mx = mean(x), my = mean(y);
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = (x[i] - mx) * (y[i] - my);
  const auto n = static_cast<double>(x.size());
  const Estimate prod = mean_se(p);
  return {prod.value * n / (n - 1.0), prod.se};
}

/// Sample variance with the SE of the centered squares.
inline Estimate variance_se(std::span<const double> x) { return covariance(x, x); }

/// Ordinary least squares y = a + b x; returns (a, b).
inline std::pair<double, double> linear_fit(std::span<const double> x, std::span<const double> y) {
  detail::require(x.size() == y.size() && x.size() >= 2, "stats::linear_fit: need matching samples");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  detail::require(sxx > 0.0, "stats::linear_fit: degenerate design");
  const double b = sxy / sxx;
  return {my - b * mx, b};
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

/// sup |F_emp - F| for a continuous CDF F.
template <class Cdf>
double ks_distance(std::span<const double> sample, Cdf&& cdf) {
  detail::require(!sample.empty(), "stats::ks_distance: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const auto n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  detail::require(!a.empty() && !b.empty(), "stats::ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / x.size() - static_cast<double>(j) / y.size()));
  }
  return d;
}

/// Asymptotic Kolmogorov distribution P(sqrt(n) D > t).
inline double kolmogorov_pvalue(double d, std::size_t n) {
  const double t = (std::sqrt(static_cast<double>(n)) + 0.12 + 0.11 / std::sqrt(static_cast<double>(n))) * d;
  if (t < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
  return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Exceedances, entropy, free energy

struct ExceedanceReport {
  double level = 0.0;
  std::uint64_t count = 0;
  std::uint64_t total = 0;
  int n = 0;
};

/// #{v : X_v > y}.
inline ExceedanceReport exceedance_count(std::span<const double> values, double y, int n = 0) {
  std::uint64_t k = 0;
  for (double v : values) k += v > y;
  return {y, k, values.size(), n};
}

struct EntropyEstimate {
  double value = 0.0;
  bool empty = false;  ///< no site above the level; value is -inf
};

/// (1/n) log #{v : X_v > E n}.
inline EntropyEstimate entropy_estimate(std::span<const double> values, double E, int n) {
  detail::require(n >= 1, "stats::entropy_estimate: n must be at least 1");
  const auto r = exceedance_count(values, E * n, n);
  if (r.count == 0) return {-kInf, true};
  return {std::log(static_cast<double>(r.count)) / n, false};
}

/// log sum_v exp(beta X_v), shifted by the maximum.
inline double log_partition(std::span<const double> values, double beta) {
  detail::require(!values.empty(), "stats::log_partition: empty field");
  const double m = *std::max_element(values.begin(), values.end());
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) w[i] = std::exp(beta * (values[i] - m));
  return beta * m + std::log(pairwise_sum(w));
}

/// f_n(beta) = (1/(beta n)) log Z_n(beta).
inline double free_energy(std::span<const double> values, double beta, int n) {
  detail::require(beta > 0.0, "stats::free_energy: beta must be positive");
  detail::require(n >= 1, "stats::free_energy: n must be at least 1");
  return log_partition(values, beta) / (beta * n);
}

/// Normalized Gibbs weights exp(beta X_v) / Z.
inline std::vector<double> gibbs_weights(std::span<const double> values, double beta) {
  detail::require(beta > 0.0, "stats::gibbs_weights: beta must be positive");
  detail::require(!values.empty(), "stats::gibbs_weights: empty field");
  const double m = *std::max_element(values.begin(), values.end());
  std::vector<double> w(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) w[i] = std::exp(beta * (values[i] - m));
  const double z = pairwise_sum(w);
  for (auto& x : w) x /= z;
  return w;
}

// ---------------------------------------------------------------------------
// Multiscale counts

/// Event of the modified exceedance count: each block m = 2..K of n/K
/// increments exceeds (1+eps)(n/K)E. The first block is unconstrained.
class KistlerEvent {
 public:
  KistlerEvent(int n, int K, double E, double eps) : n_(n), K_(K), level_((1.0 + eps) * (n / K) * E) {
    detail::require(K >= 2, "stats::kistler: K must be at least 2");
    detail::require(n % K == 0, "stats::kistler: K must divide n");
  }

  int block_length() const { return n_ / K_; }
  double block_level() const { return level_; }

  /// Evaluates the event from increments Y(1..n).
  bool from_increments(std::span<const double> y) const {
    const int len = n_ / K_;
    for (int m = 2; m <= K_; ++m) {
      double w = 0.0;
      for (int l = (m - 1) * len; l < m * len; ++l) w += y[static_cast<std::size_t>(l)];
      if (!(w > level_)) return false;
    }
    return true;
  }

  /// Same event from prefix sums X(1..n): W_m = X(m n/K) - X((m-1) n/K).
  bool from_prefixes(std::span<const double> x) const {
    const int len = n_ / K_;
    for (int m = 2; m <= K_; ++m) {
      const double w = x[static_cast<std::size_t>(m * len - 1)] - x[static_cast<std::size_t>((m - 1) * len - 1)];
      if (!(w > level_)) return false;
    }
    return true;
  }

 private:
  int n_, K_;
  double level_;
};

inline std::uint64_t kistler_count(const ScaleDecomposition& d, int K, double E, double eps) {
  const KistlerEvent ev(d.scales(), K, E, eps);
  std::uint64_t k = 0;
  for (std::size_t v = 0; v < d.sites(); ++v) k += ev.from_increments(d.increments_of(v));
  return k;
}

/// X(n) > level and X(l) <= c l + B for every l = 1..n. B = +inf disables the barrier.
class BarrierEvent {
 public:
  BarrierEvent(double c, double B, double level) : c_(c), B_(B), level_(level) {}

  bool operator()(std::span<const double> x) const {
    if (!(x.back() > level_)) return false;
    if (std::isinf(B_) && B_ > 0) return true;
    for (std::size_t l = 0; l < x.size(); ++l)
      if (x[l] > c_ * static_cast<double>(l + 1) + B_) return false;
    return true;
  }

 private:
  double c_, B_, level_;
};

inline std::uint64_t barrier_count(const ScaleDecomposition& d, double c, double B, double level) {
  const BarrierEvent ev(c, B, level);
  std::uint64_t k = 0;
  for (std::size_t v = 0; v < d.sites(); ++v) k += ev(d.prefixes_of(v));
  return k;
}

// ---------------------------------------------------------------------------
// Ballot-type probabilities

struct BallotParams {
  int n_steps = 1;
  double sigma2 = 1.0;
  double B = 1.0;  ///< barrier; +inf for none
  double b = 0.0;  ///< window lower end
  double delta = 1.0;
  std::uint64_t replicas = 1;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(n_steps >= 1, "ballot: n must be at least 1");
    detail::require(sigma2 > 0.0, "ballot: sigma2 must be positive");
    detail::require(B > 0.0, "ballot: barrier B must be positive");
    detail::require(delta > 0.0, "ballot: window width must be positive");
    detail::require(b <= B - delta, "ballot: need b <= B - delta");
    detail::require(replicas >= 1, "ballot: need at least one replica");
  }
};

/// Monte Carlo estimate of P[S_n in (b, b+delta), S_k <= B for 0 < k < n]
/// for a Gaussian walk with N(0, sigma2) steps. Walk r uses the stream of
/// replica_seed(seed, r); walks leaving the barrier stop early.
inline Estimate ballot_mc(const BallotParams& p, unsigned threads = default_threads()) {
  p.validate();
  const double sd = std::sqrt(p.sigma2);
  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t chunks = (p.replicas + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t lo = c * kChunk, hi = std::min(p.replicas, lo + kChunk);
    std::uint64_t h = 0;
    for (std::uint64_t r = lo; r < hi; ++r) {
      CounterRng rng(replica_seed(p.seed, r), 0);
      double s = 0.0;
      bool alive = true;
      for (int k = 1; k < p.n_steps; ++k) {
        s += sd * standard_normal(rng);
        if (s > p.B) {
          alive = false;
          break;
        }
      }
      if (!alive) continue;
      s += sd * standard_normal(rng);
      h += (s > p.b && s < p.b + p.delta);
    }
    hits[c] = h;
  });
  const double total = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::uint64_t{0}));
  const double ph = total / static_cast<double>(p.replicas);
  return {ph, std::sqrt(ph * (1.0 - ph) / static_cast<double>(p.replicas))};
}

/// P[S_n in (b, b+delta)] without a barrier.
inline double ballot_unconstrained(int n_steps, double sigma2, double b, double delta) {
  const double s = std::sqrt(sigma2 * n_steps);
  return 0.5 * (std::erfc(-(b + delta) / (s * std::sqrt(2.0))) - std::erfc(-b / (s * std::sqrt(2.0))));
}

// ---------------------------------------------------------------------------
// Distribution of the maximum, subleading fits

struct MaxDistribution {
  std::vector<double> x;    ///< sorted recentered maxima (M - a_n) / b_n
  std::vector<double> ecdf; ///< (i + 1) / R
  double ks = 0.0;
};

/// Recentered empirical CDF of replica maxima and its KS distance to
/// exp(-C exp(-c x)).
inline MaxDistribution max_distribution(std::span<const double> maxima, double a_n, double b_n, double c, double C) {
  detail::require(maxima.size() >= 100, "stats::max_distribution: need at least 100 replicas");
  detail::require(b_n > 0.0, "stats::max_distribution: b_n must be positive");
  MaxDistribution out;
  out.x.reserve(maxima.size());
  for (double m : maxima) out.x.push_back((m - a_n) / b_n);
  std::sort(out.x.begin(), out.x.end());
  for (std::size_t i = 0; i < out.x.size(); ++i) out.ecdf.push_back(static_cast<double>(i + 1) / out.x.size());
  out.ks = ks_distance(out.x, [&](double t) { return theory::gumbel_cdf(t, c, C); });
  return out;
}

/// Slope of (mean_max - c n) against log n by least squares.
inline double subleading_fit(std::span<const std::pair<int, double>> points, double c) {
  std::vector<double> x, y;
  for (const auto& [n, m] : points) {
    detail::require(n >= 1, "stats::subleading_fit: n must be positive");
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(m - c * n);
  }
  std::vector<double> distinct(x);
  std::sort(distinct.begin(), distinct.end());
  detail::require(std::unique(distinct.begin(), distinct.end()) - distinct.begin() >= 3,
                  "stats::subleading_fit: need at least three distinct n");
  return linear_fit(x, y).second;
}

}  // namespace logcor::stats
