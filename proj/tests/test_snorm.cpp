#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "latfact/constants.hpp"
#include "latfact/snorm.hpp"
#include "oracles.hpp"

namespace {

using latfact::DiscreteRadonMeasure;
using latfact::DualVector;
using latfact::ExponentTriple;
using latfact::LatticeNorm;
using latfact::MeasureSpace;
using latfact::SNormSpace;
using latfact::Vector;

LatticeNorm uniform_lebesgue(std::size_t n, double s) { return LatticeNorm::lebesgue(MeasureSpace::uniform(n), s); }

DiscreteRadonMeasure measure(std::vector<Vector> hs, Vector masses) {
  std::vector<DualVector> atoms;
  for (auto& h : hs) atoms.push_back({std::move(h), 0.0});
  return DiscreteRadonMeasure(std::move(atoms), std::move(masses));
}

Vector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vector v(n);
  for (double& x : v) x = d(rng);
  return v;
}

// Saturated fixtures exercised by the property tests.
std::vector<SNormSpace> fixtures() {
  std::vector<SNormSpace> out;
  out.emplace_back(uniform_lebesgue(2, 1.0), ExponentTriple(1, 2), measure({{1, 0}, {0, 1}}, {0.5, 0.5}));
  out.emplace_back(uniform_lebesgue(2, 1.0), ExponentTriple(1, 2), measure({{1, 1}}, {1.0}));
  out.emplace_back(uniform_lebesgue(3, 2.0), ExponentTriple(2, 3),
                   measure({{1, 0, 0}, {0, 0.6, 0.8}, {0.5, 0.5, 0.5}}, {0.2, 0.5, 0.3}));
  out.emplace_back(LatticeNorm::lebesgue(MeasureSpace({0.5, 1.0, 2.0, 1.5}), 3.0), ExponentTriple(1.5, 2.5),
                   measure({{0.2, 0.1, 0.1, 0.1}, {0.0, 0.3, 0.0, 0.2}}, {0.7, 0.3}));
  return out;
}

TEST(SNorm, Examples) {
  const auto x = uniform_lebesgue(2, 1.0);
  const SNormSpace halves(x, ExponentTriple(1, 2), measure({{1, 0}, {0, 1}}, {0.5, 0.5}));
  EXPECT_NEAR(latfact::s_norm(halves, Vector{1, 1}), 1.0, 1e-15);
  EXPECT_EQ(latfact::s_norm(halves, Vector{0, 0}), 0.0);
  const SNormSpace ones(x, ExponentTriple(1, 2), measure({{1, 1}}, {1.0}));
  EXPECT_NEAR(latfact::s_norm(ones, Vector{1, 1}), 2.0, 1e-15);
  EXPECT_THROW(latfact::s_norm(ones, Vector{1, 1, 1}), latfact::InputError);
}

TEST(SNorm, DiracExamples) {
  const DualVector g{{1, 1}, 0.0};
  const auto d1 = latfact::dirac_space(uniform_lebesgue(2, 1.0), ExponentTriple(1, 2), g);
  EXPECT_NEAR(latfact::s_norm(d1, Vector{2, 3}), 5.0, 1e-14);
  const auto d2 = latfact::dirac_space(uniform_lebesgue(2, 2.0), ExponentTriple(2, 2), g);
  EXPECT_NEAR(latfact::s_norm(d2, Vector{3, 4}), 5.0, 1e-14);
  EXPECT_EQ(latfact::s_norm(d2, Vector{0, 0}), 0.0);
  EXPECT_THROW(latfact::dirac_space(uniform_lebesgue(2, 1.0), ExponentTriple(1, 2), DualVector{{1, 0}, 0.0}),
               latfact::InputError);
}

TEST(SNorm, PartitionExamples) {
  const auto x = uniform_lebesgue(2, 1.0);
  const DualVector g{{1, 1}, 0.0};
  const auto s = latfact::partition_space(x, ExponentTriple(1, 2), g, {{0}, {1}}, {0.5, 0.5});
  EXPECT_NEAR(latfact::s_norm(s, Vector{1, 1}), 1.0, 1e-15);
  EXPECT_EQ(latfact::s_norm(s, Vector{0, 0}), 0.0);
  const auto single = latfact::partition_space(x, ExponentTriple(1, 2), g, {{0, 1}}, {0.25});
  const auto dirac = latfact::dirac_space(x, ExponentTriple(1, 2), g);
  EXPECT_NEAR(latfact::s_norm(single, Vector{0.3, -2}), std::pow(0.25, 0.5) * latfact::s_norm(dirac, Vector{0.3, -2}),
              1e-15);
  EXPECT_THROW(latfact::partition_space(x, ExponentTriple(1, 2), g, {{0}, {0, 1}}, {1, 1}), latfact::InputError);
  EXPECT_THROW(latfact::partition_space(x, ExponentTriple(1, 2), g, {{0}}, {1}), latfact::InputError);
  EXPECT_THROW(latfact::partition_space(x, ExponentTriple(1, 2), g, {{0}, {1}}, {1, 0}), latfact::InputError);
}

TEST(SNorm, SaturationCounterexample) {
  const auto x = uniform_lebesgue(2, 1.0);
  const SNormSpace bad(x, ExponentTriple(1, 2), measure({{1, 0}}, {1.0}));
  const auto check = latfact::xi_saturation_check(bad);
  EXPECT_FALSE(check.saturated);
  ASSERT_TRUE(check.witness_atom.has_value());
  EXPECT_EQ(*check.witness_atom, 1u);
  EXPECT_EQ(latfact::s_norm(bad, Vector{0, 3}), 0.0);
  EXPECT_THROW(LatticeNorm::from_snorm(std::make_shared<const SNormSpace>(bad)), latfact::DomainError);

  EXPECT_TRUE(latfact::xi_saturation_check(SNormSpace(x, ExponentTriple(1, 2), measure({{1, 1}}, {1.0}))).saturated);
  EXPECT_TRUE(latfact::xi_saturation_check(
                  SNormSpace(x, ExponentTriple(1, 2), measure({{1, 0}, {0, 1}}, {0.5, 0.5})))
                  .saturated);
}

TEST(SNorm, RejectsAtomsOutsideBall) {
  EXPECT_THROW(SNormSpace(uniform_lebesgue(2, 1.0), ExponentTriple(1, 2), measure({{2, 0}}, {1.0})),
               latfact::DomainError);
  EXPECT_THROW(measure({{1, 0}}, {0.0}), latfact::InputError);
  EXPECT_THROW(measure({{-1, 0}}, {1.0}), latfact::InputError);
}

TEST(SNorm, DiracCollapse) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.3, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 8;
    Vector mu(n);
    for (double& w : mu) w = u(rng) * 2.0;
    const double p = 1.0 + trial % 3 * 0.5, q = p + trial % 4;
    const auto x = LatticeNorm::lebesgue(MeasureSpace(mu), p);
    // (X_p)' = L^inf, so g in (0, 1]^n lies in the ball.
    Vector g(n);
    for (double& v : g) v = u(rng);
    const auto s = latfact::dirac_space(x, ExponentTriple(p, q), DualVector{g, 0.0});
    Vector gmu(n);
    for (std::size_t i = 0; i < n; ++i) gmu[i] = g[i] * mu[i];
    for (int k = 0; k < 25; ++k) {
      const Vector f = random_vector(rng, n);
      const double want = oracle::lp_norm(f, gmu, p);
      EXPECT_NEAR(latfact::s_norm(s, f), want, 1e-12 * want);
    }
  }
}

TEST(SNorm, PartitionFormula) {
  std::mt19937_64 rng(22);
  const Vector mu = {1.0, 0.5, 2.0, 0.7, 1.2};
  const auto x = LatticeNorm::lebesgue(MeasureSpace(mu), 1.5);
  const ExponentTriple e(1.5, 2.5);
  const Vector g = {0.4, 0.9, 0.2, 0.5, 0.3};
  const std::vector<std::vector<std::size_t>> blocks = {{0, 3}, {1}, {2, 4}};
  const Vector alpha = {0.2, 1.3, 0.6};
  const auto s = latfact::partition_space(x, e, DualVector{g, 0.0}, blocks, alpha);
  for (int k = 0; k < 1000; ++k) {
    const Vector f = random_vector(rng, mu.size());
    double total = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      Vector w(mu.size(), 0.0);
      for (std::size_t i : blocks[b]) w[i] = g[i] * mu[i];
      total += alpha[b] * std::pow(oracle::lp_norm(f, w, e.p()), e.q());
    }
    const double want = std::pow(total, 1.0 / e.q());
    EXPECT_NEAR(latfact::s_norm(s, f), want, 1e-12 * want);
  }
}

TEST(SNorm, NormPropertiesOnSaturatedFixtures) {
  std::mt19937_64 rng(23);
  for (const auto& s : fixtures()) {
    ASSERT_TRUE(s.saturated());
    const std::size_t n = s.dimension();
    const double p = s.exponents().p();
    for (int trial = 0; trial < 1000; ++trial) {
      const Vector f = random_vector(rng, n), g = random_vector(rng, n);
      Vector sum(n), dominated(n);
      for (std::size_t i = 0; i < n; ++i) {
        sum[i] = f[i] + g[i];
        dominated[i] = f[i] * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      }
      const double nf = latfact::s_norm(s, f), ng = latfact::s_norm(s, g);
      EXPECT_LE(latfact::s_norm(s, sum), (nf + ng) * (1.0 + 1e-10));
      EXPECT_LE(latfact::s_norm(s, dominated), nf * (1.0 + 1e-10));

      const std::size_t m = 1 + trial % 5;
      Vector combined(n, 0.0);
      double rhs = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const Vector h = random_vector(rng, n);
        for (std::size_t i = 0; i < n; ++i) combined[i] += std::pow(std::abs(h[i]), p);
        rhs += std::pow(latfact::s_norm(s, h), p);
      }
      for (double& v : combined) v = std::pow(v, 1.0 / p);
      EXPECT_LE(latfact::s_norm(s, combined), std::pow(rhs, 1.0 / p) * (1.0 + 1e-10));
    }
  }
}

TEST(SNorm, InclusionBound) {
  for (const auto& s : fixtures()) {
    const auto report = latfact::inclusion_bound_check(s, 2000, 3);
    EXPECT_TRUE(report.within_bound);
    EXPECT_LE(report.max_ratio, report.bound + 1e-9);
  }
  const auto x = uniform_lebesgue(2, 1.0);
  const SNormSpace heavy(x, ExponentTriple(1, 2), measure({{1, 0}, {0, 1}}, {2.0, 2.0}));
  const auto report = latfact::inclusion_bound_check(heavy, 2000, 3);
  EXPECT_NEAR(report.bound, 2.0, 1e-15);
  EXPECT_LE(report.max_ratio, 2.0 + 1e-9);
}

TEST(SNorm, ConcavityOfInclusion) {
  // (sum ||f_i||_S^q)^{1/q} <= xi(B)^{1/q} times the l^r-sup denominator.
  std::mt19937_64 rng(24);
  for (const auto& s : fixtures()) {
    const double q = s.exponents().q();
    const double bound = std::pow(s.xi().total_mass(), 1.0 / q);
    for (int trial = 0; trial < 50; ++trial) {
      latfact::Family family(1 + trial % 3);
      double lhs = 0.0;
      for (auto& f : family) {
        f = random_vector(rng, s.dimension());
        lhs += std::pow(latfact::s_norm(s, f), q);
      }
      const auto sup = latfact::family_sup_lhs(s.base(), s.exponents(), family);
      EXPECT_LE(std::pow(lhs, 1.0 / q), bound * sup.value * (1.0 + 1e-9));
    }
  }
}

}  // namespace
