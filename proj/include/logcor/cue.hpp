#pragma once

// Haar unitaries and the log-characteristic polynomial on the unit circle,
//   log|P(theta)| = sum_j log|e^{i theta} - e^{i lambda_j}|.
//
// Two exact samplers are provided. sample_haar orthonormalizes a complex
// Ginibre matrix and eigensolves it (O(N^3)). sample_verblunsky draws the
// Verblunsky coefficients of the CMV model of CUE(N), whose characteristic
// polynomial Phi_N follows from the Szego recursion (O(N) per point, O(N^2)
// for all coefficients).

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "logcor/errors.hpp"
#include "logcor/rng.hpp"

namespace logcor::cue {

using cplx = std::complex<double>;

inline constexpr int kMaxDenseDimension = 4096;
inline constexpr int kMaxDimension = 1 << 16;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSingularityTolerance = 1e-13;

inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a >= kTwoPi ? 0.0 : a;
}

/// Periodic distance on the circle, in [0, pi].
inline double periodic_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

struct EigenAngles {
  std::uint64_t seed = 0;
  std::vector<double> angles;  ///< sorted, in [0, 2 pi)

  std::size_t size() const { return angles.size(); }

  static EigenAngles from(std::vector<double> a, std::uint64_t seed = 0) {
    for (auto& x : a) x = wrap_angle(x);
    std::sort(a.begin(), a.end());
    return {seed, std::move(a)};
  }

  void write_csv(std::ostream& os) const {
    const auto prec = os.precision(17);
    os << "j,angle\n";
    for (std::size_t j = 0; j < angles.size(); ++j) os << j << ',' << angles[j] << '\n';
    os.precision(prec);
  }
};

/// Haar unitary: QR of a standard complex Ginibre matrix, with the columns of
/// Q rotated by the phases of diag(R).
inline Eigen::MatrixXcd haar_matrix(int n, std::uint64_t seed) {
  detail::require(n >= 1, "cue::haar_matrix: N must be at least 1");
  detail::require_capacity(n <= kMaxDenseDimension, "cue::haar_matrix: N above 4096");
  CounterRng rng(seed, 0);
  const double s = std::sqrt(0.5);
  Eigen::MatrixXcd z(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const double re = standard_normal(rng);
      z(i, j) = cplx(s * re, s * standard_normal(rng));
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double m = std::abs(d);
    q.col(j) *= (m > 0 ? d / m : cplx(1.0));
  }
  return q;
}

inline EigenAngles eigen_angles(const Eigen::MatrixXcd& u, std::uint64_t seed = 0) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u, false);
  detail::require(es.info() == Eigen::Success, "cue::eigen_angles: eigensolver did not converge");
  std::vector<double> a;
  a.reserve(static_cast<std::size_t>(u.rows()));
  for (Eigen::Index i = 0; i < u.rows(); ++i) a.push_back(std::arg(es.eigenvalues()[i]));
  return EigenAngles::from(std::move(a), seed);
}

inline EigenAngles sample_haar(int n, std::uint64_t seed) {
  detail::require(n >= 2, "cue::sample_haar: N must be at least 2");
  return eigen_angles(haar_matrix(n, seed), seed);
}

/// Power sums t_k = sum_j exp(i k lambda_j), stored for k = 1..k_max.
struct TraceVector {
  std::vector<cplx> t;

  int k_max() const { return static_cast<int>(t.size()); }
  cplx operator()(int k) const { return t.at(static_cast<std::size_t>(k - 1)); }

  void write_csv(std::ostream& os) const {
    const auto prec = os.precision(17);
    os << "k,re,im\n";
    for (std::size_t k = 0; k < t.size(); ++k) os << k + 1 << ',' << t[k].real() << ',' << t[k].imag() << '\n';
    os.precision(prec);
  }
};

inline TraceVector traces(const EigenAngles& a, int k_max) {
  detail::require(k_max >= 1, "cue::traces: k_max must be at least 1");
  TraceVector tv{std::vector<cplx>(static_cast<std::size_t>(k_max))};
  for (double lam : a.angles) {
    const cplx w = std::polar(1.0, lam);
    cplx p = w;
    for (int k = 1; k <= k_max; ++k) {
      // re-anchor periodically so rounding in the running product cannot drift
      if (k % 64 == 0) p = std::polar(1.0, k * lam);
      tv.t[static_cast<std::size_t>(k - 1)] += p;
      p *= w;
    }
  }
  return tv;
}

/// Sum_j log(2 |sin((theta - lambda_j)/2)|).
inline double log_charpoly(const EigenAngles& a, double theta) {
  double acc = 0.0;
  for (double lam : a.angles) {
    if (periodic_distance(theta, lam) < kSingularityTolerance)
      throw SingularityError("cue::log_charpoly: theta coincides with an eigenangle");
    acc += std::log(2.0 * std::abs(std::sin(0.5 * (theta - lam))));
  }
  return acc;
}

/// log|det(e^{i theta} I - U)| by LU, for cross-checking on small matrices.
inline double log_abs_det(const Eigen::MatrixXcd& u, double theta) {
  const Eigen::MatrixXcd a = std::polar(1.0, theta) * Eigen::MatrixXcd::Identity(u.rows(), u.cols()) - u;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) acc += std::log(std::abs(lu.matrixLU()(i, i)));
  return acc;
}

struct CueFieldSample {
  std::uint64_t seed = 0;
  std::vector<double> theta;
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
    os << "theta,value\n";
    for (std::size_t i = 0; i < theta.size(); ++i) os << theta[i] << ',' << values[i] << '\n';
    os.precision(prec);
  }
};

/// theta_m = (m + 1/2) 2 pi / M.
inline double grid_angle(std::size_t m, std::size_t m_points) {
  return (static_cast<double>(m) + 0.5) * kTwoPi / static_cast<double>(m_points);
}

inline CueFieldSample field_on_grid(const EigenAngles& a, std::size_t m_points) {
  detail::require(m_points >= a.size() && m_points >= 1, "cue::field_on_grid: need M >= N");
  CueFieldSample f{a.seed, std::vector<double>(m_points), std::vector<double>(m_points)};
  for (std::size_t m = 0; m < m_points; ++m) {
    f.theta[m] = grid_angle(m, m_points);
    f.values[m] = log_charpoly(a, f.theta[m]);
  }
  return f;
}

/// Y_theta(l) = -sum_{2^{l-1} < k <= 2^l} Re(e^{-ik theta} t_k) / k.
inline double increment(int l, double theta, const TraceVector& tv) {
  detail::require(l >= 1, "cue::increment: scale must be at least 1");
  const int hi = 1 << l;
  detail::require(hi <= tv.k_max(), "cue::increment: not enough traces for this scale");
  double acc = 0.0;
  for (int k = (hi >> 1) + 1; k <= hi; ++k) acc -= std::real(std::polar(1.0, -k * theta) * tv(k)) / k;
  return acc;
}

/// Y_theta(1..n).
inline std::vector<double> increments(double theta, const TraceVector& tv, int n) {
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(n));
  for (int l = 1; l <= n; ++l) y.push_back(increment(l, theta, tv));
  return y;
}

struct BranchingScale {
  double value = 0.0;
  bool infinite = false;
};

/// theta ^ theta' = -log2 of the periodic distance.
inline BranchingScale branching_scale(double theta, double theta_p) {
  const double d = periodic_distance(theta, theta_p);
  if (d == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {-std::log2(d), false};
}

struct CovariancePrediction {
  double value = 0.0;
  bool coupled = true;
};

/// Leading term of E[Y_theta(l) Y_theta'(l)]: log 2 / 2 before the branching scale, 0 after.
inline CovariancePrediction increment_covariance_pred(int l, double theta, double theta_p) {
  const BranchingScale b = branching_scale(theta, theta_p);
  if (b.infinite || l <= b.value) return {0.5 * std::numbers::ln2, true};
  return {0.0, false};
}

// ---------------------------------------------------------------------------
// Verblunsky (CMV) sampler

struct VerblunskySample {
  std::uint64_t seed = 0;
  std::vector<cplx> alpha;  ///< alpha_0..alpha_{N-1}; |alpha_{N-1}| = 1
  std::size_t size() const { return alpha.size(); }
};

/// alpha_k, k < N-1: uniform phase with |alpha_k|^2 ~ Beta(1, N-k-1);
/// alpha_{N-1}: uniform on the circle.
inline VerblunskySample sample_verblunsky(int n, std::uint64_t seed) {
  detail::require(n >= 1, "cue::sample_verblunsky: N must be at least 1");
  detail::require_capacity(n <= kMaxDimension, "cue::sample_verblunsky: N above 2^16");
  CounterRng rng(seed, 1);
  VerblunskySample s{seed, std::vector<cplx>(static_cast<std::size_t>(n))};
  for (int k = 0; k < n; ++k) {
    const double phase = kTwoPi * uniform01(rng);
    const double v = uniform_open0(rng);
    const int b = n - k - 1;
    const double r = b == 0 ? 1.0 : std::sqrt(-std::expm1(std::log(v) / b));
    s.alpha[static_cast<std::size_t>(k)] = std::polar(r, phase);
  }
  return s;
}

/// log|Phi_N(e^{i theta})| through the Blaschke recursion
///   B_0 = z, B_{k+1} = z (B_k - conj(alpha_k)) / (1 - alpha_k B_k),
///   log|Phi_N| = sum_k log|1 - alpha_k B_k|.
inline double log_charpoly(const VerblunskySample& s, double theta) {
  const cplx z = std::polar(1.0, theta);
  cplx b = z;
  double acc = 0.0;
  for (std::size_t k = 0; k < s.alpha.size(); ++k) {
    const cplx a = s.alpha[k];
    const cplx den = 1.0 - a * b;
    const double m = std::abs(den);
    if (m < kSingularityTolerance) throw SingularityError("cue::log_charpoly: theta coincides with an eigenangle");
    acc += std::log(m);
    if (k + 1 < s.alpha.size()) {
      b = z * (b - std::conj(a)) / den;
      b /= std::abs(b);
    }
  }
  return acc;
}

inline std::size_t next_pow2(std::size_t x) {
  std::size_t p = 1;
  while (p < x) p <<= 1;
  return p;
}

/// Coefficients of the monic characteristic polynomial, c_0 + c_1 z + ... + z^N.
class CharPoly {
 public:
  explicit CharPoly(std::vector<cplx> coeffs, std::uint64_t seed = 0) : c_(std::move(coeffs)), seed_(seed) {
    detail::require(c_.size() >= 2, "cue::CharPoly: degree must be at least 1");
  }

  /// Szego recursion Phi_{k+1} = z Phi_k - conj(alpha_k) Phi_k^*.
  static CharPoly from_verblunsky(const VerblunskySample& s) {
    const std::size_t n = s.size();
    std::vector<cplx> phi(n + 1), next(n + 1);
    phi[0] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx ab = std::conj(s.alpha[k]);
      // Phi_k^*(z) has coefficient conj(phi[k - j]) at z^j.
      next[0] = -ab * std::conj(phi[k]);
      for (std::size_t j = 1; j <= k; ++j) next[j] = phi[j - 1] - ab * std::conj(phi[k - j]);
      next[k + 1] = phi[k];
      std::swap(phi, next);
    }
    return CharPoly(std::move(phi), s.seed);
  }

  /// prod_j (z - e^{i lambda_j}). Roots are multiplied in bit-reversed order
  /// of the sorted angles: partial products over a clustered arc have
  /// exponentially large coefficients and lose all precision to cancellation.
  static CharPoly from_angles(const EigenAngles& a) {
    const std::size_t n = a.size();
    const std::size_t p = next_pow2(n);
    const int bits = std::countr_zero(p);
    std::vector<cplx> c{1.0};
    for (std::size_t i = 0; i < p; ++i) {
      std::size_t j = 0;
      for (int b = 0; b < bits; ++b) j |= ((i >> b) & 1u) << (bits - 1 - b);
      if (j >= n) continue;
      const cplx r = std::polar(1.0, a.angles[j]);
      c.push_back(0.0);
      for (std::size_t j = c.size() - 1; j > 0; --j) c[j] = c[j - 1] - r * c[j];
      c[0] = -r * c[0];
    }
    return CharPoly(std::move(c), a.seed);
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<cplx>& coefficients() const { return c_; }

  cplx operator()(cplx z) const {
    cplx acc = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) acc = acc * z + c_[k];
    return acc;
  }

  /// log|P| at theta_m = (m + 1/2) 2 pi / M by one FFT of length M.
  CueFieldSample field_on_grid(std::size_t m_points) const {
    detail::require(m_points >= static_cast<std::size_t>(degree()), "cue::CharPoly::field_on_grid: need M >= N");
    // P(theta_m) = sum_k (c_k e^{i pi k / M}) e^{2 pi i k m / M}; folding k mod M is exact.
    std::vector<cplx> buf(m_points, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k)
      buf[k % m_points] += std::conj(c_[k] * std::polar(1.0, std::numbers::pi * static_cast<double>(k) / static_cast<double>(m_points)));
    std::vector<cplx> spec;
    Eigen::FFT<double> fft;
    fft.fwd(spec, buf);
    CueFieldSample f{seed_, std::vector<double>(m_points), std::vector<double>(m_points)};
    for (std::size_t m = 0; m < m_points; ++m) {
      f.theta[m] = grid_angle(m, m_points);
      f.values[m] = std::log(std::abs(spec[m]));
    }
    return f;
  }

  /// Power sums of the roots, from the log-derivative of the reversed polynomial
  ///   z Phi*'(z) / Phi*(z) = -sum_k conj(t_k) z^k,
  /// sampled on a circle of radius r inside the disk with r^{k_max} = 0.01.
  TraceVector traces(int k_max) const {
    detail::require(k_max >= 1, "cue::CharPoly::traces: k_max must be at least 1");
    const std::size_t n = c_.size() - 1;
    const std::size_t m = next_pow2(std::max<std::size_t>(8 * static_cast<std::size_t>(k_max), 2 * (n + 1)));
    const double r = std::pow(0.01, 1.0 / k_max);
    // Phi*(z) = sum_j conj(c_{N-j}) z^j
    std::vector<cplx> p(m, 0.0), dp(m, 0.0);
    double rj = 1.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const cplx a = std::conj(c_[n - j]) * rj;
      p[j] = a;
      dp[j] = a * static_cast<double>(j);
      rj *= r;
    }
    Eigen::FFT<double> fft;
    std::vector<cplx> pv, dpv;
    // fwd computes sum_j x_j e^{-2 pi i j m / M}: values at the conjugate nodes,
    // which is only a relabeling of the sample points.
    fft.fwd(pv, p);
    fft.fwd(dpv, dp);
    std::vector<cplx> g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = dpv[i] / pv[i];
    std::vector<cplx> gh;
    fft.inv(gh, g);  // gh_k = (1/M) sum_i g_i e^{+2 pi i k i / M} = coefficient of z^k
    TraceVector tv{std::vector<cplx>(static_cast<std::size_t>(k_max))};
    double rk = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      rk *= r;
      tv.t[static_cast<std::size_t>(k - 1)] = -std::conj(gh[static_cast<std::size_t>(k)] / rk);
    }
    return tv;
  }

 private:
  std::vector<cplx> c_;
  std::uint64_t seed_;
};

}  // namespace logcor::cue
