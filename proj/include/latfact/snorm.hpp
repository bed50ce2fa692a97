#pragma once
// The space S^q_{X_p}(xi) for finitely supported xi on B+_{(X_p)'}:
//
//   ||f||_S = ( sum_k xi_k ( sum_w |f_w|^p h_k(w) mu_w )^{q/p} )^{1/q}
//
// The functional is a norm exactly when every atom of the measure space is
// charged by some h_k with positive mass; otherwise it is a seminorm and the
// space refuses to register as a LatticeNorm.

#include <cstdint>
#include <optional>

#include "latfact/spaces.hpp"

namespace latfact {

class DiscreteRadonMeasure {
 public:
  DiscreteRadonMeasure() = default;
  DiscreteRadonMeasure(std::vector<DualVector> atoms, Vector masses);
  static DiscreteRadonMeasure dirac(DualVector atom);

  std::size_t size() const { return atoms_.size(); }
  const std::vector<DualVector>& atoms() const { return atoms_; }
  const Vector& masses() const { return masses_; }
  double total_mass() const;
  bool normalized() const;
  DiscreteRadonMeasure normalized_copy() const;

 private:
  std::vector<DualVector> atoms_;
  Vector masses_;
};

struct SaturationResult {
  bool saturated = true;
  // First atom of the measure space annihilated by every h_k with xi_k > 0.
  std::optional<std::size_t> witness_atom;
};

class SNormSpace {
 public:
  // Checks that X is p-convex with constant 1 and that every h_k lies in
  // B+_{(X_p)'} up to kDualBallSlack.
  SNormSpace(LatticeNorm base, ExponentTriple e, DiscreteRadonMeasure xi);

  const LatticeNorm& base() const { return base_; }
  const ExponentTriple& exponents() const { return e_; }
  const DiscreteRadonMeasure& xi() const { return xi_; }
  std::size_t dimension() const { return base_.dimension(); }
  bool saturated() const { return saturation_.saturated; }
  const SaturationResult& saturation() const { return saturation_; }

  // Unchecked evaluation of the S-functional.
  double evaluate(std::span<const double> f) const;
  // out[k] = sum_w |f_w|^p h_k(w) mu_w
  void inner_integrals(std::span<const double> f, std::span<double> out) const;
  // Rows are h_k, one per atom of xi.
  const Matrix& atom_matrix() const { return atoms_; }

 private:
  LatticeNorm base_;
  ExponentTriple e_;
  DiscreteRadonMeasure xi_;
  Matrix atoms_;
  SaturationResult saturation_;
};

double s_norm(const SNormSpace& space, std::span<const double> f);
SaturationResult xi_saturation_check(const SNormSpace& space);

// xi = delta_g for a weak unit g of (X_p)'; the S-norm is the L^p(g dmu) norm.
SNormSpace dirac_space(const LatticeNorm& x, const ExponentTriple& e, const DualVector& g);

// xi = sum_n alpha_n delta_{g chi_{Omega_n}} for a partition of the atoms.
SNormSpace partition_space(const LatticeNorm& x, const ExponentTriple& e, const DualVector& g,
                           const std::vector<std::vector<std::size_t>>& partition, const Vector& alpha);

struct InclusionReport {
  double max_ratio = 0.0;
  double bound = 0.0;  // xi(B)^{1/q}
  std::size_t samples = 0;
  bool within_bound = true;
};

// max of ||f||_S / ||f||_X over seeded random nonzero f.
InclusionReport inclusion_bound_check(const SNormSpace& space, std::size_t samples, std::uint64_t seed);

}  // namespace latfact
