#pragma once

// Model-agnostic containers shared by the samplers and the statistics.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "logcor/errors.hpp"

namespace logcor {

/// One realization of a field: values indexed by site plus provenance.
struct FieldSample {
  std::string model;
  int n = 0;            ///< scale parameter (log2 of the site count for tree fields)
  double sigma2 = 0.0;  ///< variance per scale
  std::uint64_t seed = 0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::span<const double> view() const { return values; }
};

/// Per-site increments Y_v(l), l = 1..scales, with their left-to-right prefix
/// sums X_v(l). Storage is row-major: one row of `scales` entries per site.
class ScaleDecomposition {
 public:
  ScaleDecomposition() = default;
  ScaleDecomposition(std::size_t sites, int scales)
      : sites_(sites), scales_(scales),
        increments_(sites * static_cast<std::size_t>(scales)),
        prefix_(sites * static_cast<std::size_t>(scales)) {
    detail::require(scales >= 1, "ScaleDecomposition: need at least one scale");
  }

  std::size_t sites() const { return sites_; }
  int scales() const { return scales_; }

  /// Y_v(l), l in [1, scales].
  double increment(std::size_t v, int l) const { return increments_[index(v, l)]; }
  /// X_v(l) = Y_v(1) + ... + Y_v(l), summed left to right.
  double prefix(std::size_t v, int l) const { return prefix_[index(v, l)]; }
  double value(std::size_t v) const { return prefix(v, scales_); }

  std::span<const double> increments_of(std::size_t v) const {
    return {increments_.data() + v * scales_, static_cast<std::size_t>(scales_)};
  }
  std::span<const double> prefixes_of(std::size_t v) const {
    return {prefix_.data() + v * scales_, static_cast<std::size_t>(scales_)};
  }

  /// Writes the increments of site v and recomputes its prefix sums.
  void set_site(std::size_t v, std::span<const double> y) {
    detail::require(y.size() == static_cast<std::size_t>(scales_), "ScaleDecomposition: row length mismatch");
    double x = 0.0;
    for (int l = 0; l < scales_; ++l) {
      increments_[v * scales_ + l] = y[l];
      x += y[l];
      prefix_[v * scales_ + l] = x;
    }
  }

  /// Raw mutable access used by samplers that fill rows in place.
  double* increment_row(std::size_t v) { return increments_.data() + v * scales_; }
  double* prefix_row(std::size_t v) { return prefix_.data() + v * scales_; }

 private:
  std::size_t index(std::size_t v, int l) const {
    return v * static_cast<std::size_t>(scales_) + static_cast<std::size_t>(l - 1);
  }

  std::size_t sites_ = 0;
  int scales_ = 0;
  std::vector<double> increments_;
  std::vector<double> prefix_;
};

}  // namespace logcor
