#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "logcor/brw.hpp"
#include "logcor/errors.hpp"
#include "logcor/iid.hpp"
#include "logcor/stats.hpp"
#include "logcor/theory.hpp"

using namespace logcor;

namespace {

double sample_cov(const std::vector<double>& a, const std::vector<double>& b) {
  return stats::covariance(a, b).value;
}

}  // namespace

TEST(BrwTree, BranchingScale) {
  using brw::LeafIndex;
  EXPECT_EQ(brw::branching_scale(LeafIndex{0}, LeafIndex{0}, 4), 4);
  EXPECT_EQ(brw::branching_scale(LeafIndex{0}, LeafIndex{1}, 4), 3);
  EXPECT_EQ(brw::branching_scale(LeafIndex{0}, LeafIndex{15}, 4), 0);
  EXPECT_EQ(brw::branching_scale(LeafIndex{5}, LeafIndex{6}, 4), 2);  // 0101 vs 0110
  EXPECT_EQ(brw::covariance(LeafIndex{8}, LeafIndex{9}, 4, 2.0), 6.0);
}

TEST(BrwTree, CapacityLimits) {
  EXPECT_THROW(brw::BrwConfig({41, 1.0, 0}).validate(), CapacityError);
  EXPECT_THROW(brw::BrwConfig({0, 1.0, 0}).validate(), DomainError);
  EXPECT_THROW(brw::BrwConfig({3, -1.0, 0}).validate(), DomainError);
  EXPECT_THROW(brw::sample_field({29, 1.0, 0}), CapacityError);
  EXPECT_THROW(brw::sample_decomposition({23, 1.0, 0}), CapacityError);
}

TEST(BrwTree, StreamFieldAndDecompositionAgree) {
  const brw::BrwConfig cfg{10, 0.7, 123};
  const auto f = brw::sample_field(cfg);
  const auto d = brw::sample_decomposition(cfg);
  ASSERT_EQ(f.size(), 1024u);
  for (std::size_t v = 0; v < f.size(); ++v) {
    // same draws, same summation order: exact
    EXPECT_EQ(d.value(v), f.values[v]);
    double acc = 0.0;
    for (int l = 1; l <= 10; ++l) acc += d.increment(v, l);
    EXPECT_EQ(acc, f.values[v]);
  }
  const auto m = brw::sample_max(cfg);
  EXPECT_EQ(m.value, *std::max_element(f.values.begin(), f.values.end()));
  EXPECT_EQ(f.values[m.argmax.value], m.value);
}

TEST(BrwTree, PrefixValuesMatchDecomposition) {
  const brw::BrwConfig cfg{9, 1.0, 5};
  const auto d = brw::sample_decomposition(cfg);
  for (int l : {1, 4, 9}) {
    const auto x = brw::prefix_values(cfg, l);
    ASSERT_EQ(x.size(), std::size_t{1} << l);
    for (std::size_t p = 0; p < x.size(); ++p) EXPECT_EQ(x[p], d.prefix(p << (9 - l), l));
  }
}

TEST(BrwTree, SiblingsShareAncestorIncrements) {
  const auto d = brw::sample_decomposition({6, 1.0, 9});
  // leaves 0b101100 and 0b101111 branch at level 4
  for (int l = 1; l <= 4; ++l) EXPECT_EQ(d.increment(0b101100, l), d.increment(0b101111, l));
  EXPECT_NE(d.increment(0b101100, 5), d.increment(0b101111, 5));
}

TEST(BrwTree, Deterministic) {
  const auto a = brw::sample_field({8, 1.0, 77});
  const auto b = brw::sample_field({8, 1.0, 77});
  const auto c = brw::sample_field({8, 1.0, 78});
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(BrwTree, DumpRoundTrip) {
  const brw::BrwConfig cfg{7, 1.5, 31};
  std::stringstream ss;
  brw::write_dump(ss, cfg);
  const auto f = brw::read_dump(ss);
  EXPECT_EQ(f.n, 7);
  EXPECT_EQ(f.sigma2, 1.5);
  EXPECT_EQ(f.seed, 31u);
  EXPECT_EQ(f.values, brw::sample_field(cfg).values);
  std::stringstream truncated(ss.str().substr(0, 40));
  EXPECT_THROW(brw::read_dump(truncated), std::runtime_error);
}

TEST(BrwTree, EmpiricalCovarianceIsSigma2TimesBranchingScale) {
  const int n = 5, reps = 20000;
  const double s2 = 1.3;
  std::vector<double> x0(reps), x1(reps), x7(reps), x31(reps);
  for (int r = 0; r < reps; ++r) {
    const auto f = brw::sample_field({n, s2, replica_seed(4, r)});
    x0[r] = f.values[0];
    x1[r] = f.values[1];
    x7[r] = f.values[7];
    x31[r] = f.values[31];
  }
  // SE of a covariance estimate with variances ~ n s2 is about n s2 sqrt(2/reps)
  const double tol = 5 * n * s2 * std::sqrt(2.0 / reps);
  EXPECT_NEAR(sample_cov(x0, x0), s2 * 5, tol);
  EXPECT_NEAR(sample_cov(x0, x1), s2 * 4, tol);
  EXPECT_NEAR(sample_cov(x0, x7), s2 * 2, tol);
  EXPECT_NEAR(sample_cov(x0, x31), 0.0, tol);
}

TEST(BrwTree, IncrementsIndependentOfThePast) {
  // Markov property: Y(l+1) is uncorrelated with X(l) and has variance sigma2.
  const int reps = 20000;
  std::vector<double> past(reps), next(reps);
  for (int r = 0; r < reps; ++r) {
    const auto d = brw::sample_decomposition({6, 1.0, replica_seed(8, r)});
    past[r] = d.prefix(13, 3);
    next[r] = d.increment(13, 4);
  }
  EXPECT_NEAR(sample_cov(past, next), 0.0, 5 * std::sqrt(3.0 / reps));
  EXPECT_NEAR(stats::variance(next), 1.0, 5 * std::sqrt(2.0 / reps));
}

TEST(BrwTree, SubtreesAreSelfSimilar) {
  // Below level l, X_v(n) - X_v(l) over a subtree is a BRW of depth n - l:
  // its maximum has the same law as the maximum of a fresh depth n - l tree.
  const int n = 8, l = 3, reps = 3000;
  std::vector<double> sub, fresh;
  for (int r = 0; r < reps; ++r) {
    const auto d = brw::sample_decomposition({n, 1.0, replica_seed(21, r)});
    double best = -INFINITY;
    for (std::uint64_t v = 0; v < (1u << (n - l)); ++v) best = std::max(best, d.value(v) - d.prefix(v, l));
    sub.push_back(best);
    fresh.push_back(brw::sample_max({n - l, 1.0, replica_seed(22, r)}).value);
  }
  const double ks = stats::ks_two_sample(sub, fresh);
  // two-sample KS critical value at alpha = 0.001: 1.95 sqrt(2 / reps)
  EXPECT_LT(ks, 1.95 * std::sqrt(2.0 / reps));
}

TEST(Iid, ExplicitFieldVariance) {
  const auto f = iid::sample_field(16, 0.5, 3);
  ASSERT_EQ(f.size(), 65536u);
  EXPECT_NEAR(stats::variance(f.values), 8.0, 5 * 8.0 * std::sqrt(2.0 / 65536));
  EXPECT_THROW(iid::sample_field(29, 1.0, 0), CapacityError);
}

TEST(Iid, OrderStatisticMaxHasExactLaw) {
  // P(max <= x) = Phi(x / sd)^count, evaluated independently with erfc.
  const double count = 1000.0, var = 2.0;
  std::vector<double> m;
  for (int r = 0; r < 4000; ++r) m.push_back(iid::sample_max_of(count, var, replica_seed(1, r)));
  const double d = stats::ks_distance(m, [&](double x) {
    return std::pow(1.0 - 0.5 * std::erfc(x / std::sqrt(2 * var)), count);
  });
  EXPECT_LT(d, 1.95 / std::sqrt(4000.0));
}

TEST(Iid, OrderStatisticMatchesExplicitMaxima) {
  std::vector<double> a, b;
  for (int r = 0; r < 2000; ++r) {
    a.push_back(iid::sample_max(10, 1.0, replica_seed(2, r)));
    const auto f = iid::sample_field(10, 1.0, replica_seed(3, r));
    b.push_back(*std::max_element(f.values.begin(), f.values.end()));
  }
  EXPECT_LT(stats::ks_two_sample(a, b), 1.95 * std::sqrt(2.0 / 2000));
}

TEST(Iid, HugeCountsStayFinite) {
  const double m = iid::sample_max(900, 1.0, 4);
  EXPECT_TRUE(std::isfinite(m));
  EXPECT_NEAR(m / 900, theory::velocity(1.0), 0.05);
}

TEST(ScaleDecomposition, SetSiteBuildsPrefixes) {
  ScaleDecomposition d(2, 3);
  const double y[] = {0.5, -1.0, 2.0};
  d.set_site(1, y);
  EXPECT_EQ(d.prefix(1, 1), 0.5);
  EXPECT_EQ(d.prefix(1, 2), -0.5);
  EXPECT_EQ(d.value(1), 1.5);
  EXPECT_EQ(d.increment(1, 3), 2.0);
}
