#pragma once
// Constructive domination: find a probability measure xi on the positive dual
// ball of X_p and a constant C with
//
//   ||T f||_E <= C ||f||_{S^q_{X_p}(xi)}   for all f,
//
// by a cutting-plane loop over witness functions f and columns h of the dual
// ball, each inner problem being a finite zero-sum game solved by simplex.

#include <cstdint>
#include <optional>
#include <string>

#include "latfact/constants.hpp"
#include "latfact/snorm.hpp"

namespace latfact {

struct DominationOptions {
  double tol = 1e-6;
  // Fixed constant C. When unset, C starts from the M_{p,q} estimate inflated
  // by (1 + tol) and is raised whenever the game proves it too small.
  std::optional<double> constant;
  SearchBudget budget;
  std::uint64_t seed = 0;
  int max_iterations = 200;
};

struct DominationCertificate {
  DiscreteRadonMeasure xi;  // probability measure
  double constant = 0.0;    // C
  double residual = 0.0;    // max ||Tf|| - C ||f||_S found by the oracle at termination, ||f||_X = 1
  Family witnesses;
  int iterations = 0;
  bool converged = false;
  bool mixed = false;  // an eps-mass of the all-ones atom was added for saturation
  double p = 1.0;
  double q = 1.0;
  std::vector<double> lp_history;  // game value after each witness cut
  std::string diagnostic;
};

DominationCertificate find_domination_measure(const LinearOperator& t, const ExponentTriple& e,
                                              std::vector<DualVector> grid, const DominationOptions& options = {});

// Smallest C on a bisection over [lower, upper estimate] for which the solver converges.
DominationCertificate minimal_domination_constant(const LinearOperator& t, const ExponentTriple& e,
                                                  const std::vector<DualVector>& grid,
                                                  const DominationOptions& options = {}, int steps = 12);

// The S-space a certificate defines over the operator's domain.
SNormSpace certificate_space(const DominationCertificate& cert, const LatticeNorm& x);

struct Violation {
  Vector f;              // ||f||_X = 1
  double value = 0.0;    // ||Tf||^q - C^q ||f||_S^q
  double residual = 0.0;  // ||Tf|| - C ||f||_S
};

// Most violated f over the unit sphere of X: sign patterns times projected
// gradient ascent on magnitudes.
Violation violation_oracle(const LinearOperator& t, const SNormSpace& s, double c, const SearchBudget& budget,
                           std::uint64_t seed);

// max of ||Tf|| - C ||f||_S over seeded unit-sphere samples and the stored witnesses.
double verify_domination(const DominationCertificate& cert, const LinearOperator& t, const ExponentTriple& e,
                         std::size_t samples, std::uint64_t seed);

// w = sum_k xi_k h_k; requires p = q.
Vector collapse_weight(const DominationCertificate& cert);

// Lower estimate of sup { ||Tf|| : ||f||_S = 1 }.
double extension_norm_estimate(const LinearOperator& t, const SNormSpace& s, const SearchBudget& budget,
                               std::uint64_t seed);

struct KakutaniResult {
  DominationCertificate certificate;
  double lower = 0.0;  // a with a ||f||_S <= ||f||_X
  double upper = 0.0;  // b with ||f||_X <= b ||f||_S
};

KakutaniResult kakutani_equivalence(const LatticeNorm& x, const ExponentTriple& e, std::vector<DualVector> grid,
                                    const DominationOptions& options = {}, std::size_t samples = 2000);

}  // namespace latfact
