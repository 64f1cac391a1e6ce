#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "logcor/errors.hpp"
#include "logcor/theory.hpp"

using namespace logcor;
using namespace logcor::theory;

namespace {

// Composite Simpson rule for P(N(0, var) > a).
double tail_by_quadrature(double a, double var) {
  const double sd = std::sqrt(var);
  const double hi = std::max(a, 0.0) + 40.0 * sd;
  const double lo = a;
  const int m = 200000;
  const double h = (hi - lo) / m;
  auto f = [&](double x) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var); };
  double s = f(lo) + f(hi);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(Theory, Velocity) {
  EXPECT_NEAR(velocity(1.0), 1.1774100225154747, 1e-15);
  EXPECT_NEAR(velocity(0.5 * std::numbers::ln2), std::numbers::ln2, 1e-15);
  EXPECT_THROW(velocity(0.0), DomainError);
  EXPECT_THROW(velocity(-1.0), DomainError);
}

TEST(Theory, BetaCritical) {
  TheoryParams p(2.0, 10);
  EXPECT_NEAR(p.beta_c(), std::sqrt(2 * std::numbers::ln2 * 2.0) / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(beta_c(2.0), p.beta_c());
  EXPECT_THROW(TheoryParams(1.0, 0), DomainError);
}

TEST(Theory, Centerings) {
  const double c = velocity(1.0);
  const auto iid = iid_centering(20, 1.0);
  EXPECT_NEAR(iid.a_n, c * 20 - 0.5 / c * std::log(20.0), 1e-12);
  EXPECT_EQ(iid.b_n, 1.0);
  EXPECT_NEAR(iid.C, 1.0 / (c * std::sqrt(2 * std::numbers::pi)), 1e-15);
  EXPECT_NEAR(logcor_centering(20, 1.0), c * 20 - 1.5 / c * std::log(20.0), 1e-12);
  EXPECT_NEAR(logcor_centering(20, 1.0, 0.1) - logcor_centering(20, 1.0), 0.1 * std::log(20.0), 1e-12);
  // the log-correlated centering sits below the IID one by (sigma2/c) log n
  EXPECT_NEAR(iid.a_n - logcor_centering(20, 1.0), std::log(20.0) / c, 1e-12);
}

TEST(Theory, EntropyCurve) {
  EXPECT_NEAR(entropy_curve(0.0, 1.0), std::numbers::ln2, 1e-15);
  EXPECT_NEAR(entropy_curve(velocity(1.0), 1.0), 0.0, 1e-15);
  EXPECT_EQ(entropy_curve(10.0, 1.0), 0.0);
  EXPECT_NEAR(entropy_curve(0.5, 2.0), std::numbers::ln2 - 0.25 / 4.0, 1e-15);
  double prev = 1.0;
  for (double E = 0; E < 1.2; E += 0.01) {
    const double s = entropy_curve(E, 1.0);
    EXPECT_LE(s, prev);
    prev = s;
  }
}

TEST(Theory, FreeEnergyContinuousAtCritical) {
  for (double s2 : {0.3, 1.0, 2.5}) {
    const double bc = beta_c(s2);
    EXPECT_NEAR(free_energy_limit(bc * (1 - 1e-9), s2), free_energy_limit(bc, s2), 1e-7);
    EXPECT_NEAR(free_energy_limit(bc, s2), 2 * std::numbers::ln2, 1e-12);
    EXPECT_NEAR(free_energy_limit(2 * bc, s2), velocity(s2) * 2 * bc, 1e-12);
  }
  EXPECT_NEAR(free_energy_limit(0.5, 1.0), std::numbers::ln2 + 0.125, 1e-15);
  EXPECT_THROW(free_energy_limit(0.0, 1.0), DomainError);
}

TEST(Theory, NormalTailAgainstQuadrature) {
  for (double var : {0.5, 1.0, 20.0})
    for (double a : {-1.0, 0.0, 0.7, 2.0, 5.0, 9.0}) {
      const double q = tail_by_quadrature(a * std::sqrt(var), var);
      EXPECT_NEAR(normal_tail(a * std::sqrt(var), var), q, 1e-10 * std::max(q, 1e-10)) << a << " " << var;
    }
}

TEST(Theory, GaussianTailIsUpperEnvelope) {
  for (double a : {1.5, 2.0, 4.0, 8.0, 30.0}) {
    const double exact = normal_tail(a, 1.0);
    const double approx = gaussian_tail(a, 1.0);
    EXPECT_GE(approx, exact);
    // Mills ratio bounds: exact >= approx (1 - 1/a^2)
    EXPECT_GE(exact, approx * (1 - 1 / (a * a)));
  }
  EXPECT_THROW(gaussian_tail(0.5, 1.0), DomainError);
}

TEST(Theory, GumbelCdf) {
  EXPECT_NEAR(gumbel_cdf(0.0, 1.0, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(gumbel_cdf(50.0, 2.0, 0.3), 1.0, 1e-15);
  EXPECT_LT(gumbel_cdf(-10.0, 2.0, 0.3), 1e-100);
  EXPECT_DOUBLE_EQ(recentered_max_cdf(0.4, 1.2, 0.3, 2.0), gumbel_cdf(0.4, 1.2, 0.6));
}

TEST(Theory, FhkPrediction) {
  const double l = std::log(1024.0);
  EXPECT_NEAR(fhk_prediction(FhkModel::cue, 1024), l - 0.75 * std::log(l), 1e-12);
  const double T = std::exp(16.0);
  // log T = 16
  EXPECT_NEAR(fhk_prediction(FhkModel::zeta, T), std::log(16.0) - 0.75 * std::log(std::log(16.0)), 1e-9);
  EXPECT_THROW(fhk_prediction(FhkModel::cue, 2), DomainError);
}

TEST(Theory, CitationKeysUnique) {
  std::set<std::string> keys;
  for (const auto& c : kCitations) {
    EXPECT_TRUE(keys.insert(std::string(c.key)).second) << c.key;
    EXPECT_FALSE(c.statement.empty());
  }
  EXPECT_EQ(keys.size(), 19u);
  EXPECT_TRUE(has_citation("ballot-theorem"));
  EXPECT_FALSE(has_citation("nonexistent"));
}
