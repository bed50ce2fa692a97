#pragma once
// Operators T: X -> E on finite atomic spaces and witness-family estimators
// for ||T||, M_q(T), M_{p,q}(T) and pi_q(T). Every estimate is a lower bound
// attained by the stored witness family.

#include <cstdint>
#include <string>
#include <variant>

#include "latfact/spaces.hpp"

namespace latfact {

class CodomainNorm {
 public:
  static CodomainNorm euclidean(std::size_t d);
  static CodomainNorm lattice(LatticeNorm x);

  std::size_t dimension() const;
  bool is_euclidean() const { return std::holds_alternative<std::size_t>(rep_); }
  const LatticeNorm* as_lattice() const { return std::get_if<LatticeNorm>(&rep_); }

  double evaluate(std::span<const double> y) const;
  // Gradient of ||y||^q with respect to y. Lattice codomains must be weighted Lebesgue.
  void power_gradient(std::span<const double> y, double q, std::span<double> out) const;
  std::string describe() const;

 private:
  explicit CodomainNorm(std::variant<std::size_t, LatticeNorm> rep) : rep_(std::move(rep)) {}
  std::variant<std::size_t, LatticeNorm> rep_;
};

class LinearOperator {
 public:
  LinearOperator(Matrix matrix, LatticeNorm domain, CodomainNorm codomain);
  // The identity X -> X.
  static LinearOperator identity(const LatticeNorm& x);

  const Matrix& matrix() const { return matrix_; }
  const LatticeNorm& domain() const { return domain_; }
  const CodomainNorm& codomain() const { return codomain_; }
  std::size_t rows() const { return matrix_.rows; }
  std::size_t cols() const { return matrix_.cols; }
  bool is_zero() const;

  void apply(std::span<const double> f, std::span<double> out) const;
  Vector apply(std::span<const double> f) const;
  // ||T f||_E
  double image_norm(std::span<const double> f) const;
  // The same matrix acting on a renormed domain over the same atoms.
  LinearOperator with_domain(LatticeNorm domain) const;

 private:
  Matrix matrix_;
  LatticeNorm domain_;
  CodomainNorm codomain_;
};

// psi(h) = sum_j lambda_j ( sum_w |f_j(w)|^p h(w) mu_w )^{power}
class PowerFunctional {
 public:
  PowerFunctional(const LatticeNorm& x, double p, double power, const Family& family, Vector weights);
  PowerFunctional(const LatticeNorm& x, double p, double power, const Family& family);

  std::size_t size() const { return weights_.size(); }
  double value(std::span<const double> h) const;
  // c with d psi = sum_w c_w dh_w mu_w, the form DualBall::argmax expects.
  Vector gradient(std::span<const double> h) const;
  // out[k] = psi(rows of grid)
  void values(const Matrix& grid, std::span<double> out) const;

 private:
  std::size_t n_;
  double power_;
  Matrix pth_;     // |f_j|^p
  Matrix pth_mu_;  // |f_j|^p mu
  Vector weights_;
};

struct DualMaximum {
  DualVector h;
  double value = 0.0;  // psi(h)
};

// Conditional-gradient ascent of a convex power functional over B+_{(X_p)'}
// from each start; returns the best point. Every iterate stays in the ball.
DualMaximum maximize_power_functional(const DualBall& ball, const PowerFunctional& psi,
                                      const std::vector<Vector>& starts, int iterations = 200);

Matrix grid_matrix(const std::vector<DualVector>& grid);

struct FamilySupResult {
  double value = 0.0;        // certified lower bound (exact when `exact`)
  double upper_bound = 0.0;  // (sum ||f_i||_X^q)^{1/q}
  bool exact = false;
};

// sup over beta in B_{l^r} of || (sum |beta_i f_i|^p)^{1/p} ||_X.
FamilySupResult family_sup_lhs(const LatticeNorm& x, const ExponentTriple& e, const Family& family);
// max over the grid of ( sum_i ( int |f_i|^p h dmu )^{q/p} )^{1/q}.
double family_sup_rhs(const LatticeNorm& x, const ExponentTriple& e, const Family& family,
                      const std::vector<DualVector>& grid);
// The grid maximum refined by conditional-gradient ascent from the best grid
// points; `value` is psi(h) for the family with unit weights.
DualMaximum dual_family_argmax(const LatticeNorm& x, const ExponentTriple& e, const Family& family,
                               const std::vector<DualVector>& grid);

struct WeakNorm {
  double value = 0.0;
  bool exact = false;  // vertex enumeration over a cube dual ball
};

// sup over x* in B_{X*} of ( sum_i |<x*, f_i>|^q )^{1/q}
WeakNorm weak_q_norm(const LatticeNorm& x, double q, const Family& family);

// (sum ||T f_i||^q)^{1/q}
double image_q_sum(const LinearOperator& t, double q, const Family& family);
double operator_norm_ratio(const LinearOperator& t, std::span<const double> f);
double q_concavity_ratio(const LinearOperator& t, double q, const Family& family);
double pq_concavity_ratio(const LinearOperator& t, const ExponentTriple& e, const Family& family);
double q_summing_ratio(const LinearOperator& t, double q, const Family& family);

ConstantEstimate operator_norm_estimate(const LinearOperator& t, const SearchBudget& budget, std::uint64_t seed);
ConstantEstimate q_concavity_estimate(const LinearOperator& t, double q, const SearchBudget& budget,
                                      std::uint64_t seed);
ConstantEstimate pq_concavity_estimate(const LinearOperator& t, const ExponentTriple& e,
                                       const SearchBudget& budget, std::uint64_t seed);
ConstantEstimate q_summing_estimate(const LinearOperator& t, double q, const SearchBudget& budget,
                                    std::uint64_t seed);

struct ChainCheck {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
  bool holds = true;
};

struct ChainReport {
  ConstantEstimate operator_norm;
  ConstantEstimate q_concavity;
  ConstantEstimate pq_concavity;
  ConstantEstimate q_summing;
  std::vector<ChainCheck> checks;
  bool chain_holds = true;
};

inline constexpr double kChainSlack = 1e-6;

// Runs the four estimators, transfers each witness up the chain
// ||T|| <= M_q <= M_{p,q} <= pi_q and checks every transferred ratio.
ChainReport constant_chain_report(const LinearOperator& t, const ExponentTriple& e, const SearchBudget& budget,
                                  std::uint64_t seed);

}  // namespace latfact
