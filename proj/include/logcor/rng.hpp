#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace logcor {

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Per-replica seed: mix64(master + (r + 1) * gamma).
///
/// For a fixed master seed the map r -> seed is injective (gamma is odd and
/// mix64 is a bijection), so distinct replicas never share a stream key.
constexpr std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) noexcept {
  return mix64(master + (replica + 1) * kGoldenGamma);
}

/// Key of substream `stream` (one tree edge, one replica's phase vector, ...)
/// given the pre-mixed seed mix64(seed).
constexpr std::uint64_t stream_key_premixed(std::uint64_t mixed_seed, std::uint64_t stream) noexcept {
  return mix64(mixed_seed ^ stream);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
  return stream_key_premixed(mix64(seed), stream);
}

/// Counter-based generator: the i-th output of the stream with key k is
/// mix64(k + (i + 1) * gamma). Satisfies UniformRandomBitGenerator, so it
/// plugs into std:: and boost:: distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key) noexcept : state_(key) {}
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(stream_key(seed, stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

/// Uniform double in [0, 1) with 53 random bits.
template <class Urbg>
double uniform01(Urbg& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1]; safe to pass to log().
template <class Urbg>
double uniform_open0(Urbg& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

namespace detail {

// 256-layer ziggurat for the standard normal (Marsaglia & Tsang layout).
struct ZigguratTables {
  static constexpr int kLayers = 256;
  static constexpr double kR = 3.6541528853610088;       // start of the tail
  static constexpr double kArea = 0.00492867323399;      // area of each layer

  std::array<double, kLayers + 1> x{};
  std::array<double, kLayers + 1> f{};

  ZigguratTables() {
    const auto pdf = [](double t) { return std::exp(-0.5 * t * t); };
    x[0] = kArea / pdf(kR);
    x[1] = kR;
    for (int i = 2; i < kLayers; ++i)
      x[i] = std::sqrt(-2.0 * std::log(pdf(x[i - 1]) + kArea / x[i - 1]));
    x[kLayers] = 0.0;
    for (int i = 0; i <= kLayers; ++i) f[i] = pdf(x[i]);
  }
};

inline const ZigguratTables& ziggurat_tables() {
  static const ZigguratTables t;
  return t;
}

}  // namespace detail

/// Standard normal draw by the ziggurat method. Consumes one 64-bit word on
/// the fast path (about 98.8% of draws).
template <class Urbg>
double standard_normal(Urbg& rng) {
  const auto& z = detail::ziggurat_tables();
  for (;;) {
    const std::uint64_t bits = rng();
    const unsigned layer = static_cast<unsigned>(bits & 0xffu);
    // 53 bits -> uniform in [-1, 1)
    const double u = static_cast<double>(static_cast<std::int64_t>(bits >> 11) - (std::int64_t{1} << 52)) * 0x1.0p-52;
    const double x = u * z.x[layer];
    if (std::abs(x) < z.x[layer + 1]) return x;
    if (layer == 0) {
      // Tail beyond R.
      double t, y;
      do {
        t = -std::log(uniform_open0(rng)) / detail::ZigguratTables::kR;
        y = -std::log(uniform_open0(rng));
      } while (2.0 * y < t * t);
      return u < 0.0 ? -(detail::ZigguratTables::kR + t) : detail::ZigguratTables::kR + t;
    }
    const double h = z.f[layer + 1] + uniform01(rng) * (z.f[layer] - z.f[layer + 1]);
    if (h < std::exp(-0.5 * x * x)) return x;
  }
}

}  // namespace logcor
