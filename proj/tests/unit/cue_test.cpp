#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "logcor/cue.hpp"
#include "logcor/errors.hpp"
#include "logcor/rng.hpp"
#include "logcor/stats.hpp"

using namespace logcor;
using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// CDF of the periodic distance d in [0, pi] between the two CUE(2)
// eigenangles: density (2/pi) sin^2(d/2), so F(d) = (d - sin d) / pi.
double spacing_cdf(double d) { return (d - std::sin(d)) / kPi; }

double spacing_of(double a, double b) { return cue::periodic_distance(a, b); }

// Roots of z^2 + c1 z + c0.
std::pair<double, double> quadratic_root_angles(const std::vector<cplx>& c) {
  const cplx disc = std::sqrt(c[1] * c[1] - 4.0 * c[0]);
  return {std::arg((-c[1] + disc) / 2.0), std::arg((-c[1] - disc) / 2.0)};
}

// (1/2) sum_k min(k, N) / k^2, summed to convergence.
double exact_log_variance(int N) {
  double s = 0.0;
  for (int k = 1; k <= N; ++k) s += 1.0 / k;
  for (long k = N + 1; k < 20'000'000; ++k) s += double(N) / (double(k) * k);
  s += double(N) / 20'000'000.0;
  return 0.5 * s;
}

}  // namespace

TEST(CueAngles, WrapAndDistance) {
  EXPECT_NEAR(cue::wrap_angle(-0.5), 2 * kPi - 0.5, 1e-15);
  EXPECT_NEAR(cue::wrap_angle(7.0), 7.0 - 2 * kPi, 1e-15);
  EXPECT_NEAR(cue::periodic_distance(0.1, 2 * kPi - 0.1), 0.2, 1e-14);
  EXPECT_NEAR(cue::periodic_distance(0.0, kPi), kPi, 1e-15);
}

TEST(CueDense, HaarMatrixIsUnitary) {
  const auto u = cue::haar_matrix(20, 3);
  EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(cue::haar_matrix(4097, 0), CapacityError);
  EXPECT_THROW(cue::sample_haar(1, 0), DomainError);
}

TEST(CueDense, TwoByTwoSpacingLaw) {
  std::vector<double> d;
  for (int r = 0; r < 20000; ++r) {
    const auto a = cue::sample_haar(2, replica_seed(1, r));
    d.push_back(spacing_of(a.angles[0], a.angles[1]));
  }
  EXPECT_LT(stats::ks_distance(d, spacing_cdf), 1.95 / std::sqrt(20000.0));
}

TEST(CueVerblunsky, TwoByTwoSpacingLaw) {
  std::vector<double> d;
  for (int r = 0; r < 20000; ++r) {
    const auto p = cue::CharPoly::from_verblunsky(cue::sample_verblunsky(2, replica_seed(2, r)));
    const auto [a, b] = quadratic_root_angles(p.coefficients());
    d.push_back(spacing_of(a, b));
  }
  EXPECT_LT(stats::ks_distance(d, spacing_cdf), 1.95 / std::sqrt(20000.0));
}

TEST(CueVerblunsky, CoefficientsAreSelfInversive) {
  // all roots on the unit circle: |c_0| = 1 and c_k = c_0 conj(c_{N-k})
  const auto p = cue::CharPoly::from_verblunsky(cue::sample_verblunsky(64, 5));
  const auto& c = p.coefficients();
  ASSERT_EQ(p.degree(), 64);
  EXPECT_NEAR(std::abs(c[0]), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(c[64] - 1.0), 0.0, 1e-15);
  for (int k = 0; k <= 64; ++k) EXPECT_LT(std::abs(c[k] - c[0] * std::conj(c[64 - k])), 1e-11) << k;
}

TEST(CueCharPoly, ThreeEvaluationsAgree) {
  const auto u = cue::haar_matrix(30, 8);
  const auto a = cue::eigen_angles(u);
  const auto p = cue::CharPoly::from_angles(a);
  for (double th : {0.0, 1.0, 2.5, 5.9}) {
    const double s = cue::log_charpoly(a, th);
    EXPECT_NEAR(s, cue::log_abs_det(u, th), 1e-9);
    EXPECT_NEAR(s, std::log(std::abs(p(std::polar(1.0, th)))), 1e-9);
  }
}

TEST(CueCharPoly, BlaschkeRecursionMatchesSzegoPolynomial) {
  const auto s = cue::sample_verblunsky(200, 9);
  const auto p = cue::CharPoly::from_verblunsky(s);
  for (double th : {0.0, 0.3, 3.0, 6.1}) EXPECT_NEAR(cue::log_charpoly(s, th), std::log(std::abs(p(std::polar(1.0, th)))), 1e-9);
}

TEST(CueCharPoly, BitReversedExpansionIsAccurate) {
  const auto a = cue::sample_haar(256, 10);
  const auto p = cue::CharPoly::from_angles(a);
  for (double th : {0.05, 1.7, 4.4}) EXPECT_NEAR(std::log(std::abs(p(std::polar(1.0, th)))), cue::log_charpoly(a, th), 1e-8);
}

TEST(CueCharPoly, FftGridMatchesDirectEvaluation) {
  const auto s = cue::sample_verblunsky(100, 11);
  const auto p = cue::CharPoly::from_verblunsky(s);
  const auto f = p.field_on_grid(256);
  ASSERT_EQ(f.values.size(), 256u);
  for (std::size_t m = 0; m < 256; m += 5) {
    EXPECT_NEAR(f.theta[m], (m + 0.5) * 2 * kPi / 256, 1e-14);
    EXPECT_NEAR(f.values[m], cue::log_charpoly(s, f.theta[m]), 1e-9);
  }
  // grid shorter than N folds the coefficients; rejected
  EXPECT_THROW(p.field_on_grid(64), DomainError);
  const auto a = cue::sample_haar(12, 2);
  const auto g = cue::field_on_grid(a, 40);
  for (std::size_t m = 0; m < 40; ++m) EXPECT_NEAR(g.values[m], cue::log_charpoly(a, cue::grid_angle(m, 40)), 1e-12);
}

TEST(CueCharPoly, TracesFromPolynomialMatchPowerSums) {
  const auto a = cue::sample_haar(64, 12);
  const auto direct = cue::traces(a, 150);
  const auto viapoly = cue::CharPoly::from_angles(a).traces(150);
  for (int k = 1; k <= 150; ++k) EXPECT_LT(std::abs(direct(k) - viapoly(k)), 1e-8) << k;
  // t_k for k = N is not constrained; t_0 would be N
  EXPECT_THROW(direct(151), std::out_of_range);
}

TEST(CueCharPoly, SingularityDetected) {
  const auto a = cue::sample_haar(5, 13);
  EXPECT_THROW(cue::log_charpoly(a, a.angles[2]), SingularityError);
}

TEST(CueMoments, DiaconisShahshahaniDense) {
  const int N = 6, reps = 20000, K = 9;
  std::vector<std::vector<double>> abs2(K + 1);
  std::vector<double> cross;
  for (int r = 0; r < reps; ++r) {
    const auto t = cue::traces(cue::sample_haar(N, replica_seed(20, r)), K);
    for (int k = 1; k <= K; ++k) abs2[k].push_back(std::norm(t(k)));
    cross.push_back((t(2) * std::conj(t(3))).real());
  }
  for (int k = 1; k <= K; ++k) {
    const auto e = stats::mean_se(abs2[k]);
    EXPECT_NEAR(e.value, std::min(k, N), 5 * e.se) << k;
  }
  const auto c = stats::mean_se(cross);
  EXPECT_NEAR(c.value, 0.0, 5 * c.se);
}

TEST(CueMoments, DiaconisShahshahaniVerblunsky) {
  const int N = 6, reps = 20000, K = 9;
  std::vector<std::vector<double>> abs2(K + 1);
  for (int r = 0; r < reps; ++r) {
    const auto t = cue::CharPoly::from_verblunsky(cue::sample_verblunsky(N, replica_seed(21, r))).traces(K);
    for (int k = 1; k <= K; ++k) abs2[k].push_back(std::norm(t(k)));
  }
  for (int k = 1; k <= K; ++k) {
    const auto e = stats::mean_se(abs2[k]);
    EXPECT_NEAR(e.value, std::min(k, N), 5 * e.se) << k;
  }
}

TEST(CueMoments, LogCharpolyVarianceIsExactSum) {
  const int N = 16, reps = 20000;
  std::vector<double> v;
  for (int r = 0; r < reps; ++r) v.push_back(cue::log_charpoly(cue::sample_verblunsky(N, replica_seed(22, r)), 0.0));
  const auto e = stats::variance_se(v);
  EXPECT_NEAR(e.value, exact_log_variance(N), 5 * e.se);
  const auto m = stats::mean_se(v);
  EXPECT_NEAR(m.value, 0.0, 5 * m.se);
}

TEST(CueIncrements, RangesAndDichotomy) {
  // Y(l) uses k in (2^{l-1}, 2^l]; sum over l = 1..n is -sum_{k=2}^{2^n} Re(t_k e^{-ik theta}) / k
  const auto a = cue::sample_haar(16, 30);
  const auto tv = cue::traces(a, 16);
  const auto y = cue::increments(0.7, tv, 4);
  double s = 0.0, direct = 0.0;
  for (double yy : y) s += yy;
  for (int k = 2; k <= 16; ++k) direct -= (std::polar(1.0, -0.7 * k) * tv(k)).real() / k;
  EXPECT_NEAR(s, direct, 1e-12);
  EXPECT_THROW(cue::increment(5, 0.0, tv), DomainError);

  EXPECT_NEAR(cue::branching_scale(0.0, 0.125).value, 3.0, 1e-15);
  EXPECT_NEAR(cue::branching_scale(0.1, 2 * kPi - 0.1 + 0.05).value, -std::log2(0.15), 1e-12);
  EXPECT_TRUE(cue::increment_covariance_pred(3, 0.0, 0.125).coupled);
  EXPECT_FALSE(cue::increment_covariance_pred(4, 0.0, 0.125).coupled);
}

TEST(CueIo, CsvHeaders) {
  const auto a = cue::sample_haar(3, 1);
  std::ostringstream o1, o2, o3;
  a.write_csv(o1);
  cue::traces(a, 2).write_csv(o2);
  cue::field_on_grid(a, 4).write_csv(o3);
  EXPECT_EQ(o1.str().substr(0, 8), "j,angle\n");
  EXPECT_EQ(o2.str().substr(0, 8), "k,re,im\n");
  EXPECT_EQ(o3.str().substr(0, 12), "theta,value\n");
}
