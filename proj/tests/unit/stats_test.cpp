#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "logcor/brw.hpp"
#include "logcor/errors.hpp"
#include "logcor/iid.hpp"
#include "logcor/rng.hpp"
#include "logcor/stats.hpp"
#include "logcor/theory.hpp"

using namespace logcor;
using namespace logcor::stats;

TEST(Estimators, BasicMoments) {
  const std::vector<double> x = {1, 2, 3, 4, 10};
  EXPECT_DOUBLE_EQ(mean(x), 4.0);
  EXPECT_DOUBLE_EQ(variance(x), (9 + 4 + 1 + 0 + 36) / 4.0);
  EXPECT_DOUBLE_EQ(median(x), 3.0);
  EXPECT_DOUBLE_EQ(median(std::vector<double>{4, 1, 3, 2}), 2.5);
  EXPECT_NEAR(mean_se(x).se, std::sqrt(12.5 / 5), 1e-15);
  const std::vector<double> y = {2, 4, 6, 8, 20};
  EXPECT_DOUBLE_EQ(covariance(x, y).value, 2 * variance(x));
  EXPECT_DOUBLE_EQ(variance_se(x).value, variance(x));
  EXPECT_THROW(variance(std::vector<double>{1.0}), DomainError);
  EXPECT_THROW(mean(std::vector<double>{}), DomainError);
}

TEST(Estimators, PairwiseSumIsAccurate) {
  std::vector<double> x(1 << 20, 0.1);
  EXPECT_NEAR(pairwise_sum(x), 0.1 * (1 << 20), 1e-9);
  std::vector<double> ints;
  for (int i = 1; i <= 1000; ++i) ints.push_back(i);
  EXPECT_EQ(pairwise_sum(ints), 500500.0);
}

TEST(Estimators, LinearFitRecoversLine) {
  const std::vector<double> x = {0, 1, 2, 5};
  std::vector<double> y;
  for (double t : x) y.push_back(3 - 0.5 * t);
  const auto [a, b] = linear_fit(x, y);
  EXPECT_NEAR(a, 3.0, 1e-14);
  EXPECT_NEAR(b, -0.5, 1e-14);
  EXPECT_THROW(linear_fit(std::vector<double>{1, 1}, std::vector<double>{0, 1}), DomainError);
}

TEST(Ks, OneSampleAgainstExactCdf) {
  // evenly spaced quantiles of U(0,1): D = 1/(2n)
  std::vector<double> q;
  for (int i = 0; i < 100; ++i) q.push_back((i + 0.5) / 100);
  EXPECT_NEAR(ks_distance(q, [](double t) { return t; }), 0.005, 1e-15);
  EXPECT_NEAR(ks_distance(std::vector<double>{0.5}, [](double t) { return t; }), 0.5, 1e-15);
}

TEST(Ks, TwoSample) {
  EXPECT_EQ(ks_two_sample(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), 0.0);
  EXPECT_EQ(ks_two_sample(std::vector<double>{1, 2}, std::vector<double>{3, 4}), 1.0);
  EXPECT_NEAR(ks_two_sample(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2.5, 5}), 0.5, 1e-15);
}

TEST(Ks, KolmogorovPvalue) {
  // Q(1.358) = 0.05 for the limiting distribution
  const std::size_t n = 1000000;
  EXPECT_NEAR(kolmogorov_pvalue(1.358 / std::sqrt(double(n)), n), 0.05, 2e-3);
  EXPECT_EQ(kolmogorov_pvalue(0.0, 100), 1.0);
  EXPECT_LT(kolmogorov_pvalue(0.5, 100), 1e-20);
}

TEST(Exceedance, StrictAndMonotone) {
  const std::vector<double> x = {1, 2, 2, 3};
  EXPECT_EQ(exceedance_count(x, 2.0).count, 1u);
  EXPECT_EQ(exceedance_count(x, 1.999).count, 3u);
  EXPECT_EQ(exceedance_count(x, 0.0).total, 4u);
  const auto f = brw::sample_field({12, 1.0, 3});
  std::uint64_t prev = ~0ULL;
  double prev_s = 1e9;
  for (double E = 0; E < 1.3; E += 0.05) {
    const auto c = exceedance_count(f.values, E * 12).count;
    EXPECT_LE(c, prev);
    prev = c;
    const auto s = entropy_estimate(f.values, E, 12);
    EXPECT_LE(s.value, prev_s);
    prev_s = s.value;
  }
  EXPECT_TRUE(entropy_estimate(f.values, 100.0, 12).empty);
  EXPECT_EQ(entropy_estimate(f.values, 100.0, 12).value, -std::numeric_limits<double>::infinity());
}

TEST(FreeEnergy, DegenerateFieldAndOverflow) {
  const std::vector<double> zeros(1 << 10, 0.0);
  for (double beta : {0.1, 1.0, 50.0}) EXPECT_NEAR(free_energy(zeros, beta, 10), std::numbers::ln2 / beta, 1e-14);
  const std::vector<double> big = {1e3, 999.0, -5.0};
  const double lz = log_partition(big, 10.0);
  EXPECT_TRUE(std::isfinite(lz));
  EXPECT_NEAR(lz, 1e4 + std::log1p(std::exp(-10.0) + std::exp(-10050.0)), 1e-9);
}

TEST(FreeEnergy, SandwichAndConvexity) {
  const int n = 14;
  const auto f = brw::sample_field({n, 1.0, 4});
  const double mx = *std::max_element(f.values.begin(), f.values.end());
  std::vector<double> lz;
  const double h = 0.05;
  for (double beta = 0.05; beta < 5.0; beta += h) {
    const double fe = free_energy(f.values, beta, n);
    EXPECT_GE(fe, mx / n - 1e-12);
    EXPECT_LE(fe, std::numbers::ln2 / beta + mx / n + 1e-12);
    lz.push_back(log_partition(f.values, beta));
  }
  for (std::size_t i = 1; i + 1 < lz.size(); ++i) EXPECT_GE(lz[i + 1] - 2 * lz[i] + lz[i - 1], -1e-9);
  EXPECT_THROW(free_energy(f.values, 0.0, n), DomainError);
}

TEST(FreeEnergy, GibbsWeights) {
  const std::vector<double> x = {0.0, 1.0, -2.0, 0.5};
  const auto w = gibbs_weights(x, 2.0);
  double s = 0;
  for (double t : w) s += t;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_EQ(std::max_element(w.begin(), w.end()) - w.begin(), 1);
  const auto u = gibbs_weights(std::vector<double>(8, 3.0), 1.0);
  for (double t : u) EXPECT_NEAR(t, 0.125, 1e-15);
  const auto near_uniform = gibbs_weights(x, 1e-9);
  double tv = 0;
  for (double t : near_uniform) tv += 0.5 * std::abs(t - 0.25);
  EXPECT_LT(tv, 1e-6);
}

TEST(Kistler, EventDefinition) {
  const KistlerEvent ev(8, 4, 1.0, 0.0);  // blocks of 2, level 2
  EXPECT_EQ(ev.block_length(), 2);
  EXPECT_DOUBLE_EQ(ev.block_level(), 2.0);
  // first block is free
  const std::vector<double> y = {-9, -9, 1.5, 0.6, 1, 1.01, 3, 0};
  EXPECT_TRUE(ev.from_increments(y));
  std::vector<double> x(8);
  double acc = 0;
  for (int i = 0; i < 8; ++i) x[i] = acc += y[i];
  EXPECT_TRUE(ev.from_prefixes(x));
  // exactly at the level is not an exceedance
  const std::vector<double> tie = {0, 0, 1, 1, 1, 1.01, 3, 0};
  EXPECT_FALSE(ev.from_increments(tie));
  EXPECT_THROW(KistlerEvent(10, 4, 1.0, 0.0), DomainError);
}

TEST(Kistler, BoundedByExceedances) {
  const int n = 12, K = 4;
  const auto d = brw::sample_decomposition({n, 1.0, 6});
  const double E = 0.5, eps = 0.05;
  const auto k = kistler_count(d, K, E, eps);
  // counted sites have sum_{m >= 2} W_m > (1 + eps)(1 - 1/K) E n
  const KistlerEvent ev(n, K, E, eps);
  std::uint64_t check = 0;
  for (std::size_t v = 0; v < d.sites(); ++v) {
    if (!ev.from_increments(d.increments_of(v))) continue;
    ++check;
    EXPECT_GT(d.value(v) - d.prefix(v, n / K), (1 + eps) * (1 - 1.0 / K) * E * n);
  }
  EXPECT_EQ(check, k);
  EXPECT_EQ(kistler_count(d, K, -100.0, 0.0), d.sites());
}

TEST(Barrier, SentinelsAndBound) {
  const int n = 12;
  const auto d = brw::sample_decomposition({n, 1.0, 7});
  std::vector<double> vals;
  for (std::size_t v = 0; v < d.sites(); ++v) vals.push_back(d.value(v));
  const double c = theory::velocity(1.0);
  for (double level : {0.0, 3.0, 8.0}) {
    EXPECT_EQ(barrier_count(d, c, kInf, level), exceedance_count(vals, level).count);
    EXPECT_LE(barrier_count(d, c, 1.0, level), exceedance_count(vals, level).count);
    EXPECT_EQ(barrier_count(d, c, -c * n, level), 0u);
  }
}

TEST(Ballot, OneStepClosedForm) {
  BallotParams p{1, 1.0, 1.0, -0.5, 1.0, 400000, 3};
  const auto e = ballot_mc(p, 1);
  const double exact = 0.5 * (std::erfc(-0.5 / std::sqrt(2.0)) - std::erfc(0.5 / std::sqrt(2.0)));
  EXPECT_NEAR(exact, ballot_unconstrained(1, 1.0, -0.5, 1.0), 1e-15);
  EXPECT_NEAR(e.value, exact, 4 * e.se);
}

TEST(Ballot, InfiniteBarrierIsUnconstrained) {
  BallotParams p{10, 2.0, kInf, 0.0, 1.0, 300000, 4};
  const auto e = ballot_mc(p, 1);
  EXPECT_NEAR(e.value, ballot_unconstrained(10, 2.0, 0.0, 1.0), 4 * e.se);
}

TEST(Ballot, DeterministicAcrossThreadsAndValidated) {
  BallotParams p{20, 1.0, 1.0, 0.0, 1.0, 200000, 5};
  EXPECT_EQ(ballot_mc(p, 1).value, ballot_mc(p, 3).value);
  p.b = 0.5;
  EXPECT_THROW(ballot_mc(p, 1), DomainError);
  p.b = 0.0;
  p.B = -1;
  EXPECT_THROW(ballot_mc(p, 1), DomainError);
}

TEST(MaxDistribution, SelfTestWithLimitQuantiles) {
  const double c = 1.2, C = 0.3;
  std::vector<double> q;
  const int n = 5000;
  for (int i = 0; i < n; ++i) {
    const double u = (i + 0.5) / n;
    q.push_back(-std::log(-std::log(u) / C) / c + 7.0);  // inverse of exp(-C e^{-c x}) shifted by a_n = 7
  }
  const auto d = max_distribution(q, 7.0, 1.0, c, C);
  EXPECT_LT(d.ks, 1.0 / n + 1e-12);
  EXPECT_EQ(d.x.size(), 5000u);
  EXPECT_NEAR(d.ecdf.back(), 1.0, 0.0);
  EXPECT_THROW(max_distribution(std::vector<double>(99, 0.0), 0, 1, c, C), DomainError);
}

TEST(MaxDistribution, IidMaximaAreGumbel) {
  const int n = 20, reps = 2000;
  const double c = theory::velocity(1.0);
  const auto ic = theory::iid_centering(n, 1.0);
  std::vector<double> m;
  for (int r = 0; r < reps; ++r) m.push_back(iid::sample_max(n, 1.0, replica_seed(30, r)));
  EXPECT_LE(max_distribution(m, ic.a_n, ic.b_n, c, ic.C).ks, 0.05);
}

TEST(MaxDistribution, BrwMaximaDriftAwayFromIidCentering) {
  const int n = 20, reps = 200;
  const double c = theory::velocity(1.0);
  const auto ic = theory::iid_centering(n, 1.0);
  std::vector<double> m;
  for (int r = 0; r < reps; ++r) m.push_back(brw::sample_max({n, 1.0, replica_seed(31, r)}).value);
  EXPECT_GT(max_distribution(m, ic.a_n, ic.b_n, c, ic.C).ks, 0.1);
}

TEST(SubleadingFit, ExactRecovery) {
  const double s2 = 1.7, c = theory::velocity(s2);
  std::vector<std::pair<int, double>> pts;
  for (int n : {12, 16, 20, 24}) pts.emplace_back(n, c * n - 1.5 * (s2 / c) * std::log(double(n)) + 0.4);
  EXPECT_NEAR(subleading_fit(pts, c), -1.5 * s2 / c, 1e-10);
  const std::vector<std::pair<int, double>> two = {{12, 1.0}, {16, 2.0}, {16, 2.5}};
  EXPECT_THROW(subleading_fit(two, c), DomainError);
}
