#pragma once

// Gaussian branching random walk on the binary tree of depth n.
//
// Leaf v in [0, 2^n) is read as the n-bit root-to-leaf path, most significant
// bit first. The edge entering the depth-l node with path prefix p has id
// 2^l + p and carries the increment sqrt(sigma2) * Z, where Z is drawn from
// the counter-based stream (seed, id). Every sampler below reads the same
// edge draws, so streaming, dense and max-only samplers agree bit for bit.

#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "logcor/binary_io.hpp"
#include "logcor/errors.hpp"
#include "logcor/field.hpp"
#include "logcor/rng.hpp"

namespace logcor::brw {

inline constexpr int kMaxDepth = 40;
inline constexpr int kMaxMaterializedDepth = 28;
inline constexpr int kMaxDecompositionDepth = 22;

struct BrwConfig {
  int n = 1;
  double sigma2 = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(n >= 1, "BrwConfig: depth n must be at least 1");
    detail::require(sigma2 > 0.0 && std::isfinite(sigma2), "BrwConfig: sigma2 must be positive");
    detail::require_capacity(n <= kMaxDepth, "BrwConfig: depth n exceeds 40");
  }
  std::uint64_t leaves() const { return std::uint64_t{1} << n; }
};

struct LeafIndex {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(LeafIndex, LeafIndex) = default;
};

/// Length of the common prefix of the n-bit paths of u and v, in [0, n].
constexpr int branching_scale(LeafIndex u, LeafIndex v, int n) {
  const std::uint64_t diff = u.value ^ v.value;
  if (diff == 0) return n;
  return n - static_cast<int>(std::bit_width(diff));
}

constexpr double covariance(LeafIndex u, LeafIndex v, int n, double sigma2) {
  return sigma2 * branching_scale(u, v, n);
}

/// Draws edge increments for one configuration.
class EdgeSource {
 public:
  explicit EdgeSource(const BrwConfig& cfg)
      : sd_(std::sqrt(cfg.sigma2)), mixed_seed_(mix64(cfg.seed)) {}

  /// Y for the edge entering the depth-`level` node with path `prefix`.
  double operator()(int level, std::uint64_t prefix) const {
    CounterRng rng(stream_key_premixed(mixed_seed_, (std::uint64_t{1} << level) + prefix));
    return sd_ * standard_normal(rng);
  }

 private:
  double sd_;
  std::uint64_t mixed_seed_;
};

/// Depth-first leaf cursor holding only the n partial sums on the current
/// root-to-leaf path. Leaves are visited in increasing index order.
class LeafStream {
 public:
  explicit LeafStream(const BrwConfig& cfg) : cfg_(validated(cfg)), edges_(cfg), path_(cfg.n) {
    refill_from(1);
  }

  bool done() const { return index_ >= cfg_.leaves(); }
  LeafIndex index() const { return {index_}; }
  double value() const { return path_.back(); }
  /// X_v(1), ..., X_v(n) for the current leaf.
  std::span<const double> path() const { return path_; }

  void advance() {
    ++index_;
    if (done()) return;
    const int changed = std::countr_zero(index_) + 1;
    refill_from(cfg_.n - changed + 1);
  }

 private:
  static const BrwConfig& validated(const BrwConfig& cfg) {
    cfg.validate();
    return cfg;
  }

  void refill_from(int level) {
    double x = level > 1 ? path_[level - 2] : 0.0;
    for (int l = level; l <= cfg_.n; ++l) {
      x += edges_(l, index_ >> (cfg_.n - l));
      path_[l - 1] = x;
    }
  }

  BrwConfig cfg_;
  EdgeSource edges_;
  std::vector<double> path_;
  std::uint64_t index_ = 0;
};

/// Calls fn(LeafIndex, value) for every leaf in index order.
template <class Fn>
void for_each_leaf(const BrwConfig& cfg, Fn&& fn) {
  for (LeafStream s(cfg); !s.done(); s.advance()) fn(s.index(), s.value());
}

/// Streams every leaf into `os` as little-endian doubles after a header of
/// (n as u64, sigma2 as f64, seed as u64).
inline void write_dump(std::ostream& os, const BrwConfig& cfg) {
  cfg.validate();
  io::put_u64(os, static_cast<std::uint64_t>(cfg.n));
  io::put_f64(os, cfg.sigma2);
  io::put_u64(os, cfg.seed);
  for_each_leaf(cfg, [&](LeafIndex, double x) { io::put_f64(os, x); });
}

inline FieldSample read_dump(std::istream& is) {
  FieldSample f;
  f.model = "brw";
  f.n = static_cast<int>(io::get_u64(is));
  f.sigma2 = io::get_f64(is);
  f.seed = io::get_u64(is);
  detail::require(f.n >= 1 && f.n <= kMaxMaterializedDepth, "brw::read_dump: bad depth in header");
  f.values.resize(std::size_t{1} << f.n);
  for (auto& x : f.values) x = io::get_f64(is);
  return f;
}

/// All 2^n leaf values, in index order.
inline FieldSample sample_field(const BrwConfig& cfg) {
  cfg.validate();
  detail::require_capacity(cfg.n <= kMaxMaterializedDepth,
                           "brw::sample_field: n > 28 cannot be materialized; use LeafStream");
  FieldSample f{"brw", cfg.n, cfg.sigma2, cfg.seed, {}};
  f.values.reserve(cfg.leaves());
  for_each_leaf(cfg, [&](LeafIndex, double x) { f.values.push_back(x); });
  return f;
}

struct MaxResult {
  double value;
  LeafIndex argmax;  ///< smallest index attaining the maximum
};

inline MaxResult sample_max(const BrwConfig& cfg) {
  MaxResult best{-INFINITY, {0}};
  for (LeafStream s(cfg); !s.done(); s.advance()) {
    if (s.value() > best.value) best = {s.value(), s.index()};
  }
  return best;
}

/// X_v(l) for the 2^l depth-l prefixes, read off the depth-n tree.
inline std::vector<double> prefix_values(const BrwConfig& cfg, int l) {
  cfg.validate();
  detail::require(l >= 1 && l <= cfg.n, "brw::prefix_values: level out of range");
  detail::require_capacity(l <= kMaxMaterializedDepth, "brw::prefix_values: level too deep");
  std::vector<double> out;
  out.reserve(std::size_t{1} << l);
  const std::uint64_t stride = std::uint64_t{1} << (cfg.n - l);
  LeafStream s(cfg);
  for (std::uint64_t p = 0; p < (std::uint64_t{1} << l); ++p) {
    out.push_back(s.path()[l - 1]);
    for (std::uint64_t k = 0; k < stride; ++k) s.advance();
  }
  return out;
}

/// Dense increment matrix Y_v(l) with prefix sums; same draws as LeafStream.
inline ScaleDecomposition sample_decomposition(const BrwConfig& cfg) {
  cfg.validate();
  detail::require_capacity(cfg.n <= kMaxDecompositionDepth,
                           "brw::sample_decomposition: n > 22 is not materialized; use LeafStream");
  ScaleDecomposition d(cfg.leaves(), cfg.n);
  const EdgeSource edges(cfg);
  for (std::uint64_t v = 0; v < cfg.leaves(); ++v) {
    double* y = d.increment_row(v);
    double* x = d.prefix_row(v);
    double acc = 0.0;
    for (int l = 1; l <= cfg.n; ++l) {
      const std::uint64_t prefix = v >> (cfg.n - l);
      // Rows sharing a prefix share the draw; copy it from the first leaf below it.
      const std::uint64_t first = prefix << (cfg.n - l);
      y[l - 1] = first == v ? edges(l, prefix) : d.increment(first, l);
      acc += y[l - 1];
      x[l - 1] = acc;
    }
  }
  return d;
}

}  // namespace logcor::brw
