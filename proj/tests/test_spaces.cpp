#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "latfact/spaces.hpp"
#include "oracles.hpp"

namespace {

using latfact::DualSampling;
using latfact::LatticeNorm;
using latfact::MeasureSpace;
using latfact::Vector;

Vector random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0) {
  std::uniform_real_distribution<double> d(lo, 1.0);
  Vector v(n);
  for (double& x : v) x = d(rng);
  return v;
}

Vector random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(0.2, 2.0);
  Vector w(n);
  for (double& x : w) x = d(rng);
  return w;
}

TEST(Spaces, RejectsBadMeasures) {
  EXPECT_THROW(MeasureSpace(Vector{}), latfact::InputError);
  EXPECT_THROW(MeasureSpace(Vector{1.0, 0.0}), latfact::InputError);
  EXPECT_THROW(LatticeNorm::lebesgue(MeasureSpace::uniform(2), latfact::kInfinity), latfact::InputError);
  EXPECT_THROW(latfact::ExponentTriple(2.0, 1.0), latfact::InputError);
}

TEST(Spaces, ExponentTriple) {
  const latfact::ExponentTriple a(1.0, 2.0);
  EXPECT_DOUBLE_EQ(a.r(), 2.0);
  EXPECT_FALSE(a.r_infinite());
  const latfact::ExponentTriple b(2.0, 3.0);
  EXPECT_NEAR(1.0 / b.p(), 1.0 / b.r() + 1.0 / b.q(), 1e-12);
  const latfact::ExponentTriple c(2.0, 2.0);
  EXPECT_TRUE(c.r_infinite());
  EXPECT_EQ(c.r_over_p(), latfact::kInfinity);
  EXPECT_EQ(latfact::conjugate_exponent(1.0), latfact::kInfinity);
  EXPECT_EQ(latfact::conjugate_exponent(latfact::kInfinity), 1.0);
}

TEST(Spaces, NormExamples) {
  const auto l2 = LatticeNorm::lebesgue(MeasureSpace::uniform(2), 2.0);
  EXPECT_NEAR(latfact::norm(l2, Vector{3, 4}), 5.0, 1e-14);
  EXPECT_EQ(latfact::norm(l2, Vector{0, 0}), 0.0);
  const auto l1 = LatticeNorm::lebesgue(MeasureSpace({2.0, 1.0}), 1.0);
  EXPECT_NEAR(latfact::norm(l1, Vector{1, 1}), 3.0, 1e-14);
  EXPECT_THROW(latfact::norm(l2, Vector{1, 2, 3}), latfact::InputError);
  EXPECT_THROW(latfact::norm(l2, Vector{1, NAN}), latfact::InputError);
}

TEST(Spaces, PthPowerExamples) {
  const auto l2 = LatticeNorm::lebesgue(MeasureSpace::uniform(2), 2.0);
  EXPECT_NEAR(latfact::pth_power_norm(l2, 2.0, Vector{1, 3}), 4.0, 1e-14);
  EXPECT_EQ(latfact::pth_power_norm(l2, 2.0, Vector{0, 0}), 0.0);
  const auto l4 = LatticeNorm::lebesgue(MeasureSpace::uniform(2), 4.0);
  EXPECT_NEAR(latfact::pth_power_norm(l4, 2.0, Vector{1, 1}), std::sqrt(2.0), 1e-14);
  EXPECT_THROW(latfact::pth_power_norm(l2, 3.0, Vector{1, 1}), latfact::DomainError);
}

TEST(Spaces, KotheExamples) {
  const auto l1 = LatticeNorm::lebesgue(MeasureSpace::uniform(2), 1.0);
  EXPECT_NEAR(latfact::kothe_dual_norm(l1, Vector{2, 3}), 3.0, 1e-14);
  EXPECT_EQ(latfact::kothe_dual_norm(l1, Vector{0, 0}), 0.0);
  const auto l2 = LatticeNorm::lebesgue(MeasureSpace::uniform(2), 2.0);
  EXPECT_NEAR(latfact::kothe_dual_norm(l2, Vector{3, 4}), 5.0, 1e-14);
}

TEST(Spaces, KotheClosedFormMatchesNumeric) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const double s = 1.0 + std::uniform_real_distribution<double>(0.0, 4.0)(rng);
    const auto x = LatticeNorm::lebesgue(MeasureSpace(random_weights(rng, n)), s);
    const Vector h = random_vector(rng, n);
    const double closed = latfact::kothe_dual_norm(x, h);
    const double numeric = latfact::kothe_dual_norm_numeric(x, h);
    EXPECT_NEAR(numeric, closed, 1e-7 * closed) << "s=" << s << " n=" << n;
    EXPECT_NEAR(closed, oracle::lp_norm(h, Vector(x.measure().weights().begin(), x.measure().weights().end()),
                                        oracle::conjugate(s)),
                1e-12 * closed);
  }
}

TEST(Spaces, NormAxiomsAndHolder) {
  std::mt19937_64 rng(5);
  for (double s : {1.0, 1.5, 2.0, 3.0, 7.0}) {
    const std::size_t n = 4;
    const Vector mu = random_weights(rng, n);
    const auto x = LatticeNorm::lebesgue(MeasureSpace(mu), s);
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector f = random_vector(rng, n), g = random_vector(rng, n);
      const double a = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
      const double nf = latfact::norm(x, f), ng = latfact::norm(x, g);
      Vector sum(n), scaled(n), dominated(n);
      for (std::size_t i = 0; i < n; ++i) {
        sum[i] = f[i] + g[i];
        scaled[i] = a * f[i];
        dominated[i] = f[i] * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      }
      EXPECT_LE(latfact::norm(x, sum), (nf + ng) * (1.0 + 1e-10));
      EXPECT_NEAR(latfact::norm(x, scaled), std::abs(a) * nf, 1e-10 * std::abs(a) * nf + 1e-300);
      EXPECT_LE(latfact::norm(x, dominated), nf * (1.0 + 1e-10));
      EXPECT_NEAR(nf, oracle::lp_norm(f, mu, s), 1e-12 * nf);
      double pairing = 0.0;
      for (std::size_t i = 0; i < n; ++i) pairing += std::abs(f[i] * g[i]) * mu[i];
      EXPECT_LE(pairing, nf * latfact::kothe_dual_norm(x, g) * (1.0 + 1e-10));
    }
  }
}

TEST(Spaces, PthPowerIsANorm) {
  std::mt19937_64 rng(9);
  for (auto [s, p] : {std::pair{2.0, 2.0}, {3.0, 2.0}, {4.0, 1.5}, {1.0, 1.0}}) {
    const auto x = LatticeNorm::lebesgue(MeasureSpace(random_weights(rng, 3)), s);
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector f = random_vector(rng, 3), g = random_vector(rng, 3);
      Vector sum(3);
      for (std::size_t i = 0; i < 3; ++i) sum[i] = f[i] + g[i];
      EXPECT_LE(latfact::pth_power_norm(x, p, sum),
                (latfact::pth_power_norm(x, p, f) + latfact::pth_power_norm(x, p, g)) * (1.0 + 1e-10));
    }
  }
}

TEST(Spaces, ExtremeSamplingOfCube) {
  const auto l1 = LatticeNorm::lebesgue(MeasureSpace::uniform(2), 1.0);
  const auto grid = latfact::sample_positive_dual_ball(l1, 1.0, DualSampling::extreme, 8, 1);
  ASSERT_EQ(grid.size(), 8u);
  for (const Vector& want : {Vector{1, 1}, Vector{1, 0}, Vector{0, 1}, Vector{0, 0}}) {
    bool found = false;
    for (const auto& g : grid) found = found || g.h == want;
    EXPECT_TRUE(found) << want[0] << "," << want[1];
  }
  EXPECT_TRUE(latfact::sample_positive_dual_ball(l1, 1.0, DualSampling::extreme, 0, 1).empty());
  EXPECT_THROW(latfact::parse_dual_sampling("sobol"), latfact::InputError);
}

TEST(Spaces, SampledPointsLieInBall) {
  const auto l2 = LatticeNorm::lebesgue(MeasureSpace::uniform(2), 2.0);
  for (auto strategy : {DualSampling::extreme, DualSampling::random}) {
    const auto grid = latfact::sample_positive_dual_ball(l2, 2.0, strategy, 200, 4);
    ASSERT_EQ(grid.size(), 200u);
    const auto x2 = l2.pth_power(2.0);
    for (const auto& g : grid) {
      EXPECT_LE(g.certified_norm, 1.0 + latfact::kDualBallSlack);
      EXPECT_LE(latfact::kothe_dual_norm(x2, g.h), 1.0 + latfact::kDualBallSlack);
      for (double v : g.h) EXPECT_GE(v, 0.0);
    }
  }
  const auto a = latfact::sample_positive_dual_ball(l2, 2.0, DualSampling::random, 20, 4);
  const auto b = latfact::sample_positive_dual_ball(l2, 2.0, DualSampling::random, 20, 4);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].h, b[k].h);
}

TEST(Spaces, DualBallArgmaxAttainsDualNorm) {
  std::mt19937_64 rng(12);
  for (auto [s, p] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {3.0, 2.0}, {2.0, 2.0}}) {
    const auto x = LatticeNorm::lebesgue(MeasureSpace(random_weights(rng, 4)), s);
    const latfact::DualBall ball(x, p);
    const Vector c = random_vector(rng, 4, 0.0);
    const Vector h = ball.argmax(c);
    EXPECT_LE(ball.norm(h), 1.0 + 1e-12);
    double pairing = 0.0;
    for (std::size_t i = 0; i < 4; ++i) pairing += c[i] * h[i] * x.measure().weight(i);
    // The maximum of <c, h> over the dual ball is the X_p norm of c.
    EXPECT_NEAR(pairing, latfact::norm(x.pth_power(p), c), 1e-10);
  }
}

TEST(Spaces, PConvexityEstimates) {
  latfact::SearchBudget budget{12, 60, 4};
  const auto l2 = LatticeNorm::lebesgue(MeasureSpace::uniform(3), 2.0);
  EXPECT_NEAR(latfact::p_convexity_estimate(l2, 2.0, budget).value, 1.0, 1e-9);
  const auto l1 = LatticeNorm::lebesgue(MeasureSpace::uniform(3), 1.0);
  EXPECT_NEAR(latfact::p_convexity_estimate(l1, 1.0, budget).value, 1.0, 1e-9);

  const auto l1_2 = LatticeNorm::lebesgue(MeasureSpace::uniform(2), 1.0);
  const auto est = latfact::p_convexity_estimate(l1_2, 2.0, budget);
  const double grid = oracle::p_convexity_pair_grid({1.0, 1.0}, 1.0, 2.0, 8);
  EXPECT_NEAR(grid, std::sqrt(2.0), 1e-12);
  EXPECT_GE(est.value, grid * (1.0 - 1e-9));
  EXPECT_NEAR(latfact::p_convexity_ratio(l1_2, 2.0, est.witness), est.value, 1e-9 * est.value);

  const auto larger = latfact::p_convexity_estimate(l1_2, 2.0, latfact::SearchBudget{24, 60, 4});
  EXPECT_GE(larger.value, est.value);
}

}  // namespace
