#pragma once

// Random Euler-product model of zeta on a unit interval of shifts:
//   X_h = sum_{p <= T} Re(U_p p^{-ih}) / sqrt(p),  U_p i.i.d. uniform on the circle,
// with T = exp(2^n) and prime blocks 2^{l-1} < log p <= 2^l.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "logcor/errors.hpp"
#include "logcor/primes.hpp"
#include "logcor/rng.hpp"

namespace logcor::zeta {

inline constexpr int kMaxScales = 4;

/// floor(exp(2^n)).
inline std::uint64_t dyadic_cutoff(int n) {
  detail::require(n >= 1, "zeta: n must be at least 1");
  detail::require_capacity(n <= kMaxScales, "zeta: n >= 5 needs primes up to exp(32); the model is capped at n = 4");
  return static_cast<std::uint64_t>(std::floor(std::exp(std::ldexp(1.0, n))));
}

/// Sieved tables are shared between models with the same cutoff.
inline std::shared_ptr<const primes::PrimeTable> cached_primes(std::uint64_t limit) {
  static std::mutex mu;
  static std::map<std::uint64_t, std::shared_ptr<const primes::PrimeTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[limit];
  if (!slot) slot = std::make_shared<const primes::PrimeTable>(primes::sieve_primes(limit));
  return slot;
}

/// Phases U_p = exp(i angle_p), one per prime in table order.
struct PhaseVector {
  std::uint64_t seed = 0;
  std::vector<double> angles;
};

inline PhaseVector sample_phases(std::size_t count, std::uint64_t seed) {
  PhaseVector ph{seed, std::vector<double>(count)};
  CounterRng rng(seed, 0);
  for (auto& a : ph.angles) a = 2.0 * std::numbers::pi * uniform01(rng);
  return ph;
}

/// Index range [begin, end) of the primes of block l.
struct PrimeBlock {
  int l = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

struct ZetaFieldSample {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<double> h;
  std::vector<double> values;

  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] > values[best]) best = i;
    return best;
  }
  double max() const { return values.at(argmax()); }

  void write_csv(std::ostream& os) const {
    const auto prec = os.precision(17);
    os << "h,value\n";
    for (std::size_t i = 0; i < h.size(); ++i) os << h[i] << ',' << values[i] << '\n';
    os.precision(prec);
  }
};

class ZetaModel {
 public:
  explicit ZetaModel(int n) : ZetaModel(n, cached_primes(dyadic_cutoff(n))) {}

  ZetaModel(int n, std::shared_ptr<const primes::PrimeTable> table) : n_(n), table_(std::move(table)) {
    detail::require(n >= 1, "zeta: n must be at least 1");
    const auto& ps = table_->primes;
    log_p_.reserve(ps.size());
    inv_sqrt_p_.reserve(ps.size());
    for (auto p : ps) {
      log_p_.push_back(std::log(static_cast<double>(p)));
      inv_sqrt_p_.push_back(1.0 / std::sqrt(static_cast<double>(p)));
    }
    // p = 2 has log p < 1 and joins block 1.
    std::size_t i = 0;
    for (int l = 1; l <= n; ++l) {
      const double hi = std::ldexp(1.0, l);
      PrimeBlock b{l, i, i};
      while (b.end < ps.size() && log_p_[b.end] <= hi) ++b.end;
      if (b.size() == 0)
        throw DomainError("zeta: empty prime block " + std::to_string(l) + " (exp(" + std::to_string(hi / 2) +
                          ") < p <= exp(" + std::to_string(hi) + "))");
      blocks_.push_back(b);
      i = b.end;
    }
    detail::require(i == ps.size(), "zeta: prime table extends beyond exp(2^n)");
  }

  int scales() const { return n_; }
  const primes::PrimeTable& table() const { return *table_; }
  std::size_t prime_count() const { return table_->size(); }
  const PrimeBlock& block(int l) const {
    detail::require(l >= 1 && l <= n_, "zeta: scale out of range");
    return blocks_[static_cast<std::size_t>(l - 1)];
  }

  PhaseVector sample_phases(std::uint64_t seed) const { return zeta::sample_phases(prime_count(), seed); }

  /// Y_h(l): the block sum over primes of block l in increasing order.
  double increment(int l, double h, const PhaseVector& ph) const {
    check(ph);
    const PrimeBlock& b = block(l);
    double acc = 0.0;
    for (std::size_t i = b.begin; i < b.end; ++i) acc += std::cos(ph.angles[i] - h * log_p_[i]) * inv_sqrt_p_[i];
    return acc;
  }

  /// The field, as the sum of block sums for l = 1..n.
  double field(double h, const PhaseVector& ph) const {
    double acc = 0.0;
    for (int l = 1; l <= n_; ++l) acc += increment(l, h, ph);
    return acc;
  }

  /// (1/2) sum over block l of 1/p.
  double block_variance(int l) const {
    const PrimeBlock& b = block(l);
    double acc = 0.0;
    for (std::size_t i = b.begin; i < b.end; ++i) acc += inv_sqrt_p_[i] * inv_sqrt_p_[i];
    return 0.5 * acc;
  }

  double field_variance() const {
    double acc = 0.0;
    for (int l = 1; l <= n_; ++l) acc += block_variance(l);
    return acc;
  }

  /// Field on h_m = m/M, m = 0..M-1, evaluated by rotating p^{-ih} one grid step at a time.
  ZetaFieldSample field_on_grid(std::size_t m_points, const PhaseVector& ph) const {
    check(ph);
    detail::require(m_points >= 2, "zeta: grid needs at least two points");
    ZetaFieldSample out{n_, ph.seed, std::vector<double>(m_points), std::vector<double>(m_points, 0.0)};
    for (std::size_t m = 0; m < m_points; ++m) out.h[m] = static_cast<double>(m) / static_cast<double>(m_points);
    std::vector<double> block_acc(m_points);
    for (int l = 1; l <= n_; ++l) {
      const PrimeBlock& b = block(l);
      std::fill(block_acc.begin(), block_acc.end(), 0.0);
      for (std::size_t i = b.begin; i < b.end; ++i) {
        const double step = log_p_[i] / static_cast<double>(m_points);
        const double cs = std::cos(step), sn = std::sin(step);
        double re = std::cos(ph.angles[i]) * inv_sqrt_p_[i], im = std::sin(ph.angles[i]) * inv_sqrt_p_[i];
        for (std::size_t m = 0; m < m_points; ++m) {
          block_acc[m] += re;
          // multiply by exp(-i step)
          const double nre = re * cs + im * sn;
          im = im * cs - re * sn;
          re = nre;
        }
      }
      for (std::size_t m = 0; m < m_points; ++m) out.values[m] += block_acc[m];
    }
    return out;
  }

  const std::vector<double>& log_primes() const { return log_p_; }
  const std::vector<double>& inv_sqrt_primes() const { return inv_sqrt_p_; }

 private:
  void check(const PhaseVector& ph) const {
    detail::require(ph.angles.size() == prime_count(), "zeta: phase vector does not match the prime table");
  }

  int n_;
  std::shared_ptr<const primes::PrimeTable> table_;
  std::vector<double> log_p_, inv_sqrt_p_;
  std::vector<PrimeBlock> blocks_;
};

/// Increments Y_h(l) for a fixed set of shifts, with cos/sin(h log p)/sqrt(p)
/// tabulated once so each replica costs one sincos per prime.
class ShiftedIncrements {
 public:
  ShiftedIncrements(const ZetaModel& model, std::vector<double> shifts) : model_(&model), shifts_(std::move(shifts)) {
    const std::size_t np = model.prime_count();
    cos_.resize(shifts_.size() * np);
    sin_.resize(shifts_.size() * np);
    for (std::size_t k = 0; k < shifts_.size(); ++k)
      for (std::size_t i = 0; i < np; ++i) {
        const double a = shifts_[k] * model.log_primes()[i];
        cos_[k * np + i] = std::cos(a) * model.inv_sqrt_primes()[i];
        sin_[k * np + i] = std::sin(a) * model.inv_sqrt_primes()[i];
      }
  }

  const std::vector<double>& shifts() const { return shifts_; }

  /// Row k holds Y_{h_k}(1..n).
  std::vector<std::vector<double>> evaluate(const PhaseVector& ph) const {
    const std::size_t np = model_->prime_count();
    detail::require(ph.angles.size() == np, "zeta: phase vector does not match the prime table");
    std::vector<double> c(np), s(np);
    for (std::size_t i = 0; i < np; ++i) {
      c[i] = std::cos(ph.angles[i]);
      s[i] = std::sin(ph.angles[i]);
    }
    std::vector<std::vector<double>> out(shifts_.size(), std::vector<double>(static_cast<std::size_t>(model_->scales())));
    for (std::size_t k = 0; k < shifts_.size(); ++k) {
      const double* ck = cos_.data() + k * np;
      const double* sk = sin_.data() + k * np;
      for (int l = 1; l <= model_->scales(); ++l) {
        const PrimeBlock& b = model_->block(l);
        double acc = 0.0;
        // cos(a - h log p) = cos a cos(h log p) + sin a sin(h log p)
        for (std::size_t i = b.begin; i < b.end; ++i) acc += c[i] * ck[i] + s[i] * sk[i];
        out[k][static_cast<std::size_t>(l - 1)] = acc;
      }
    }
    return out;
  }

 private:
  const ZetaModel* model_;
  std::vector<double> shifts_;
  std::vector<double> cos_, sin_;
};

inline ZetaFieldSample sample_field(int n, std::size_t m_points, std::uint64_t seed) {
  const ZetaModel model(n);
  return model.field_on_grid(m_points, model.sample_phases(seed));
}

struct BranchingScale {
  double value = 0.0;
  bool infinite = false;
};

/// h ^ h' = log2(1/|h - h'|); flagged infinite when h = h'.
inline BranchingScale branching_scale(double h, double hp) {
  const double d = std::abs(h - hp);
  if (d == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {-std::log2(d), false};
}

enum class Regime { coupled, decoupled };

inline const char* to_string(Regime r) { return r == Regime::coupled ? "coupled" : "decoupled"; }

struct CovariancePrediction {
  double value = 0.0;
  Regime regime = Regime::coupled;
};

/// Leading term of E[Y_h(l) Y_h'(l)]: log 2 / 2 up to the branching scale, 0 beyond.
inline CovariancePrediction increment_covariance_pred(int l, double h, double hp) {
  detail::require(l >= 1, "zeta: scale must be at least 1");
  const BranchingScale b = branching_scale(h, hp);
  if (b.infinite || l <= b.value) return {0.5 * std::numbers::ln2, Regime::coupled};
  return {0.0, Regime::decoupled};
}

}  // namespace logcor::zeta
