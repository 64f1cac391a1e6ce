#pragma once

// Reference field: 2^n IID centered Gaussians of variance sigma2 * n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "logcor/errors.hpp"
#include "logcor/field.hpp"
#include "logcor/rng.hpp"

namespace logcor::iid {

inline constexpr int kMaxExplicitLevels = 28;

/// 2^n explicit draws of N(0, sigma2 n).
inline FieldSample sample_field(int n, double sigma2, std::uint64_t seed) {
  detail::require(n >= 1 && sigma2 > 0.0, "iid::sample_field: need n >= 1, sigma2 > 0");
  detail::require_capacity(n <= kMaxExplicitLevels, "iid::sample_field: n too large for explicit sampling");
  FieldSample f{"iid", n, sigma2, seed, {}};
  const std::size_t count = std::size_t{1} << n;
  const double sd = std::sqrt(sigma2 * n);
  f.values.resize(count);
  CounterRng rng(seed, 0);
  for (auto& x : f.values) x = sd * standard_normal(rng);
  return f;
}

/// Exact draw of the maximum of `count` IID N(0, var) variables, by inverting
/// P(max <= x) = Phi(x)^count. The upper-tail mass q = 1 - U^{1/count} is
/// formed with expm1 so that it stays accurate when q is tiny.
inline double sample_max_of(double count, double var, std::uint64_t seed) {
  detail::require(count >= 1.0 && var > 0.0, "iid::sample_max_of: need count >= 1, var > 0");
  CounterRng rng(seed, 1);
  const double u = uniform_open0(rng);
  double q = -std::expm1(std::log(u) / count);
  q = std::clamp(q, 1e-300, 1.0 - 1e-16);
  return std::sqrt(2.0 * var) * boost::math::erfc_inv(2.0 * q);
}

/// Maximum of the 2^n-site IID field with variance sigma2 * n.
inline double sample_max(int n, double sigma2, std::uint64_t seed) {
  detail::require(n >= 1 && n < 1000, "iid::sample_max: need 1 <= n < 1000");
  return sample_max_of(std::ldexp(1.0, n), sigma2 * n, seed);
}

}  // namespace logcor::iid
