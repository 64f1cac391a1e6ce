#pragma once

// Closed-form predictions for extremes of log-correlated fields. Everything
// here is a pure function of its arguments; natural logarithms throughout.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "logcor/errors.hpp"

namespace logcor::theory {

inline constexpr double kLog2 = std::numbers::ln2;

/// Leading-order velocity of the maximum, c = sqrt(2 log 2 sigma2).
inline double velocity(double sigma2) {
  detail::require(sigma2 > 0.0 && std::isfinite(sigma2), "velocity: sigma2 must be positive");
  return std::sqrt(2.0 * kLog2 * sigma2);
}

/// Variance per scale and scale count, with the derived constants.
struct TheoryParams {
  double sigma2 = 1.0;
  int n = 1;

  TheoryParams(double sigma2_, int n_) : sigma2(sigma2_), n(n_) {
    detail::require(sigma2 > 0.0, "TheoryParams: sigma2 must be positive");
    detail::require(n >= 1, "TheoryParams: n must be at least 1");
  }

  double velocity() const { return theory::velocity(sigma2); }
  /// Critical inverse temperature beta_c = c / sigma2.
  double beta_c() const { return velocity() / sigma2; }
};

inline double beta_c(double sigma2) { return velocity(sigma2) / sigma2; }

struct IidCentering {
  double a_n;  ///< recentering
  double b_n;  ///< rescaling (always 1)
  double C;    ///< Gumbel prefactor
};

/// Recentering of the maximum of 2^n IID N(0, sigma2 n) variables:
/// a_n = c n - (1/2)(sigma2/c) log n, b_n = 1, C = (sigma/c)/sqrt(2 pi).
inline IidCentering iid_centering(int n, double sigma2) {
  detail::require(n >= 1, "iid_centering: n must be at least 1");
  const double c = velocity(sigma2);
  const double a = c * n - 0.5 * (sigma2 / c) * std::log(static_cast<double>(n));
  const double C = (std::sqrt(sigma2) / c) / std::sqrt(2.0 * std::numbers::pi);
  return {a, 1.0, C};
}

/// m_n(eps) = c n - (3 sigma2 / (2c)) log n + eps log n.
inline double logcor_centering(int n, double sigma2, double eps = 0.0) {
  detail::require(n >= 1, "logcor_centering: n must be at least 1");
  const double c = velocity(sigma2);
  const double ln = std::log(static_cast<double>(n));
  return c * n - 1.5 * (sigma2 / c) * ln + eps * ln;
}

/// Entropy of high points: log 2 - E^2/(2 sigma2) on [0, c], 0 beyond c.
inline double entropy_curve(double E, double sigma2) {
  detail::require(E >= 0.0, "entropy_curve: E must be non-negative");
  const double c = velocity(sigma2);
  if (E >= c) return 0.0;
  return std::max(0.0, kLog2 - E * E / (2.0 * sigma2));
}

/// Limit of (1/n) log Z_n(beta): log 2 + beta^2 sigma2 / 2 below beta_c,
/// c beta at and above it (frozen phase).
inline double free_energy_limit(double beta, double sigma2) {
  detail::require(beta > 0.0, "free_energy_limit: beta must be positive");
  const double c = velocity(sigma2);
  if (beta < c / sigma2) return kLog2 + 0.5 * beta * beta * sigma2;
  return c * beta;
}

/// Asymptotic Gaussian tail (1/sqrt(2 pi)) (sqrt(var)/a) exp(-a^2/(2 var)).
/// An upper envelope of P(N(0, var) > a); only meaningful for a > sqrt(var).
inline double gaussian_tail(double a, double var) {
  detail::require(var > 0.0, "gaussian_tail: variance must be positive");
  const double sd = std::sqrt(var);
  detail::require(a > sd, "gaussian_tail: requires a > sqrt(var)");
  return (sd / a) * std::exp(-a * a / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi);
}

/// Exact P(N(0, var) > a).
inline double normal_tail(double a, double var) {
  detail::require(var > 0.0, "normal_tail: variance must be positive");
  return 0.5 * std::erfc(a / std::sqrt(2.0 * var));
}

/// exp(-C exp(-c x)).
inline double gumbel_cdf(double x, double c, double C) {
  detail::require(c > 0.0 && C > 0.0, "gumbel_cdf: c and C must be positive");
  return std::exp(-C * std::exp(-c * x));
}

/// Limit law E[exp(-C Z e^{-c x})] with Z = 1 supplied by the caller's C.
inline double recentered_max_cdf(double x, double c, double C, double Z = 1.0) {
  return gumbel_cdf(x, c, C * Z);
}

enum class FhkModel { zeta, cue };

/// Predicted maximum up to O(1):
///   zeta: log log T - (3/4) log log log T   (size = T > e^e)
///   cue:  log N - (3/4) log log N           (size = N >= 3)
inline double fhk_prediction(FhkModel model, double size) {
  if (model == FhkModel::cue) {
    detail::require(size >= 3.0, "fhk_prediction: cue requires N >= 3");
    const double l = std::log(size);
    return l - 0.75 * std::log(l);
  }
  detail::require(size > std::exp(std::numbers::e), "fhk_prediction: zeta requires T > e^e");
  const double ll = std::log(std::log(size));
  return ll - 0.75 * std::log(ll);
}

/// Citation keys embedded in experiment reports.
struct Citation {
  std::string_view key;
  std::string_view statement;
};

inline constexpr Citation kCitations[] = {
    {"iid-gumbel-limit", "max of 2^n IID N(0, sigma2 n) minus a_n converges to exp(-C e^{-c x})"},
    {"gaussian-tail", "P(N(0,v) > a) ~ (1/sqrt(2 pi)) (sqrt(v)/a) exp(-a^2/(2v))"},
    {"logcor-recentering", "m_n = c n - (3 sigma2/(2c)) log n"},
    {"entropy-high-points", "(1/n) log #{X_v > E n} -> log 2 - E^2/(2 sigma2) on [0, c]"},
    {"free-energy-freezing", "(1/n) log Z_n(beta) -> log 2 + beta^2 sigma2/2 below beta_c, c beta above"},
    {"brw-leading-order", "max / n -> sqrt(2 log 2) sigma"},
    {"brw-subleading-order", "(max - c n) / log n -> -3/2 (sigma2/c)"},
    {"kistler-multiscale", "modified exceedance count with K coarse blocks is positive w.h.p."},
    {"barrier-exceedances", "E #{X_v(n) > m_n, X_v(l) <= c l + B} = O(1)"},
    {"ballot-theorem", "P[S_n in (b, b+delta), S_k <= B] is of order n^{-3/2}"},
    {"gff-green-function", "G_n(v,v') = expected visits; (1/pi) log(2^n/d^2) + O(1)"},
    {"gff-density", "GFF density exp(-(1/8) sum (x_v - x_v')^2)"},
    {"gff-multiscale", "Var Y_v(l) = log 2/pi + o(1); increments couple below the branching scale"},
    {"zeta-increment-variance", "E[Y_h(l)^2] = log 2/2 + O(exp(-c sqrt(2^l)))"},
    {"zeta-correlation-estimates", "E[Y_h(l) Y_h'(l)] = log 2/2 below h^h', 0 above, up to O(2^-|l - h^h'|)"},
    {"diaconis-shahshahani", "E[Tr U^j conj(Tr U^k)] = delta_jk min(k, N)"},
    {"keating-snaith-variance", "log|P(theta)| / sqrt((1/2) log N) -> N(0,1)"},
    {"fhk-unitary", "max log|P| = log N - (3/4) log log N + O(1)"},
    {"cue-increment-dichotomy", "E[Y_t(l) Y_t'(l)] = log 2/2 below t^t', 0 above"},
};

inline bool has_citation(std::string_view key) {
  for (const auto& c : kCitations)
    if (c.key == key) return true;
  return false;
}

}  // namespace logcor::theory
