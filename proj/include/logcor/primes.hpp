#pragma once

// Segmented sieve of Eratosthenes and a compact on-disk prime table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "logcor/binary_io.hpp"
#include "logcor/errors.hpp"

namespace logcor::primes {

inline constexpr std::uint64_t kMaxSieveLimit = 1'000'000'000ULL;

struct PrimeTable {
  std::uint64_t cutoff = 0;
  std::vector<std::uint64_t> primes;

  std::size_t size() const { return primes.size(); }

  /// Header u64 cutoff, u64 count, then LEB128 gaps (the first gap is from 0).
  void write(std::ostream& os) const {
    io::put_u64(os, cutoff);
    io::put_u64(os, primes.size());
    std::uint64_t prev = 0;
    for (auto p : primes) {
      io::put_varint(os, p - prev);
      prev = p;
    }
  }

  static PrimeTable read(std::istream& is) {
    PrimeTable t;
    t.cutoff = io::get_u64(is);
    const std::uint64_t count = io::get_u64(is);
    t.primes.reserve(count);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      prev += io::get_varint(is);
      t.primes.push_back(prev);
    }
    return t;
  }
};

inline std::vector<std::uint64_t> simple_sieve(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<char> composite(limit + 1, 0);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return out;
}

/// All primes p <= limit, by a segmented sieve over odd numbers.
inline PrimeTable sieve_primes(std::uint64_t limit) {
  detail::require(limit >= 2, "sieve_primes: limit must be at least 2");
  detail::require_capacity(limit <= kMaxSieveLimit, "sieve_primes: limit above 10^9");
  PrimeTable t{limit, {2}};
  if (limit >= 3 && limit > 1e6) t.primes.reserve(static_cast<std::size_t>(1.1 * limit / std::log(static_cast<double>(limit))));

  auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(limit)));
  while (root * root > limit) --root;
  while ((root + 1) * (root + 1) <= limit) ++root;
  const std::vector<std::uint64_t> base = simple_sieve(root);

  // Segment slot i stands for the odd number lo + 2i.
  constexpr std::uint64_t kSlots = 1u << 18;
  std::vector<char> composite(kSlots);
  for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSlots) {
    const std::uint64_t hi = std::min(limit, lo + 2 * kSlots - 1);
    const std::uint64_t slots = (hi - lo) / 2 + 1;
    std::fill(composite.begin(), composite.begin() + static_cast<std::ptrdiff_t>(slots), 0);
    for (std::size_t k = 1; k < base.size(); ++k) {
      const std::uint64_t p = base[k];
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t m = start; m <= hi; m += 2 * p) composite[(m - lo) / 2] = 1;
    }
    for (std::uint64_t i = 0; i < slots; ++i)
      if (!composite[i]) t.primes.push_back(lo + 2 * i);
  }
  return t;
}

/// Loads a cached table from path if it covers limit, otherwise sieves and
/// (best effort) writes the cache.
inline PrimeTable load_or_sieve(const std::string& path, std::uint64_t limit) {
  if (std::ifstream in{path, std::ios::binary}) {
    try {
      PrimeTable t = PrimeTable::read(in);
      if (t.cutoff == limit) return t;
    } catch (const std::exception&) {
    }
  }
  PrimeTable t = sieve_primes(limit);
  if (std::ofstream out{path, std::ios::binary}) t.write(out);
  return t;
}

}  // namespace logcor::primes
