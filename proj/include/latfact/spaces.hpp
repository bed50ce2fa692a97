#pragma once
// Finite atomic measure spaces and the lattice norms that live on them:
// weighted Lebesgue norms, p-th powers, Köthe duals, and the positive part of
// the dual unit ball of X_p that the S-spaces and the domination solver sample.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>

#include "latfact/common.hpp"
#include "latfact/search.hpp"

namespace latfact {

class SNormSpace;

class MeasureSpace {
 public:
  explicit MeasureSpace(Vector weights);
  static MeasureSpace uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  double total() const;

  bool operator==(const MeasureSpace&) const = default;

 private:
  Vector weights_;
};

// 1 <= p <= q < inf and 1/r = 1/p - 1/q; r is infinite exactly when p == q.
class ExponentTriple {
 public:
  ExponentTriple(double p, double q);

  double p() const { return p_; }
  double q() const { return q_; }
  double r() const { return r_; }
  bool r_infinite() const { return r_ == kInfinity; }
  double q_over_p() const { return q_ / p_; }
  // Conjugate exponent of q/p; infinite when p == q.
  double r_over_p() const { return r_infinite() ? kInfinity : r_ / p_; }

 private:
  double p_;
  double q_;
  double r_;
};

// Hölder conjugate with the explicit infinity marker: 1 <-> inf.
double conjugate_exponent(double s);

class LatticeNorm {
 public:
  struct WeightedLebesgue {
    double s;
  };
  struct PowerOf {
    std::shared_ptr<const LatticeNorm> base;
    double p;
  };
  using Rep = std::variant<WeightedLebesgue, std::shared_ptr<const SNormSpace>, PowerOf>;

  static LatticeNorm lebesgue(MeasureSpace mu, double s);
  // Registers a saturated S-space as a norm; throws DomainError when the
  // S-functional is only a seminorm.
  static LatticeNorm from_snorm(std::shared_ptr<const SNormSpace> space);

  const MeasureSpace& measure() const { return mu_; }
  std::size_t dimension() const { return mu_.size(); }
  const Rep& rep() const { return rep_; }
  const WeightedLebesgue* as_lebesgue() const { return std::get_if<WeightedLebesgue>(&rep_); }
  const SNormSpace* as_snorm() const;

  // Largest p for which this norm is known to be p-convex with constant 1.
  double convexity_exponent() const;

  // X_p with its norm |||f|^{1/p}||^p. Requires p <= convexity_exponent().
  LatticeNorm pth_power(double p) const;

  // Unchecked evaluation; use latfact::norm for validated input.
  double evaluate(std::span<const double> f) const;

  std::string describe() const;

 private:
  LatticeNorm(MeasureSpace mu, Rep rep) : mu_(std::move(mu)), rep_(std::move(rep)) {}

  MeasureSpace mu_;
  Rep rep_;
};

double norm(const LatticeNorm& x, std::span<const double> f);
double pth_power_norm(const LatticeNorm& x, double p, std::span<const double> f);

// sup over ||f||_X <= 1 of sum_i |h_i f_i| mu_i. Closed form for weighted
// Lebesgue norms, numerical ascent otherwise.
double kothe_dual_norm(const LatticeNorm& x, std::span<const double> h);
// Always the numerical route (multi-start simplex search on the ratio
// <|h|, f>_mu / ||f||_X, which is quasi-concave on the positive cone).
double kothe_dual_norm_numeric(const LatticeNorm& x, std::span<const double> h);

struct DualVector {
  Vector h;
  double certified_norm = 0.0;
};

inline constexpr double kDualBallSlack = 1e-9;

// The positive part of the unit ball of (X_p)'.
class DualBall {
 public:
  DualBall(LatticeNorm x, double p);
  // Forces the numerical routes even when closed forms exist.
  static DualBall numeric(LatticeNorm x, double p);

  std::size_t dimension() const { return power_.dimension(); }
  const LatticeNorm& power_space() const { return power_; }
  // Exponent t of (X_p)' = L^t(mu) when X is weighted Lebesgue.
  std::optional<double> dual_exponent() const;

  double norm(std::span<const double> h) const;
  // A maximizer of sum_w c_w h_w mu_w over the ball, for c >= 0.
  Vector argmax(std::span<const double> c) const;
  DualVector certify(Vector h) const;
  // Canonical boundary candidates: every 0/1 pattern when the ball is a cube,
  // normalized indicators otherwise (all subsets when n <= 12).
  std::vector<DualVector> extreme_candidates() const;
  // A seeded random point on the positive unit sphere.
  DualVector random_point(std::mt19937_64& rng) const;
  // The strictly positive all-ones direction scaled onto the sphere.
  DualVector positive_unit() const;

 private:
  DualBall(LatticeNorm x, double p, bool force_numeric);

  LatticeNorm power_;
  double p_;
  bool closed_form_;
};

enum class DualSampling { extreme, random };
DualSampling parse_dual_sampling(const std::string& name);

// `count` points of B+_{(X_p)'}: the extreme candidates first (extreme
// strategy only), then seeded random points on the positive unit sphere.
std::vector<DualVector> sample_positive_dual_ball(const LatticeNorm& x, double p, DualSampling strategy,
                                                  std::size_t count, std::uint64_t seed);
// All extreme candidates followed by `random_count` random sphere points.
std::vector<DualVector> default_dual_grid(const LatticeNorm& x, double p, std::size_t random_count,
                                          std::uint64_t seed);

enum class ConstantKind { operator_norm, q_concavity, pq_concavity, q_summing, p_convexity };
std::string to_string(ConstantKind kind);

// A certified lower bound together with the finite family attaining it.
struct ConstantEstimate {
  ConstantKind kind = ConstantKind::operator_norm;
  double value = 0.0;
  Family witness;
  long budget_used = 0;
};

// || (sum_i |f_i|^e)^{1/e} ||_X
double lattice_power_sum_norm(const LatticeNorm& x, const Family& family, double e);

// Ratio || (sum |f_i|^p)^{1/p} ||_X / (sum ||f_i||_X^p)^{1/p}; 0 for the zero family.
double p_convexity_ratio(const LatticeNorm& x, double p, const Family& family);
ConstantEstimate p_convexity_estimate(const LatticeNorm& x, double p, const SearchBudget& budget,
                                      std::uint64_t seed = 0);

}  // namespace latfact
