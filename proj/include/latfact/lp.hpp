#pragma once
// Dense-tableau primal simplex for packing LPs
//
//   maximize c^T x  subject to  A x <= b,  x >= 0,  with b >= 0,
//
// whose origin is feasible, so no phase one is needed. Dantzig pricing with a
// switch to Bland's rule after a run of degenerate pivots.

#include "latfact/common.hpp"

namespace latfact {

enum class LpStatus { optimal, unbounded, iteration_limit };

struct LpResult {
  LpStatus status = LpStatus::optimal;
  double value = 0.0;
  Vector x;      // primal solution
  Vector duals;  // y >= 0 with A^T y >= c and b^T y = value at optimality
  long pivots = 0;
};

LpResult solve_packing_lp(const Matrix& a, const Vector& b, const Vector& c, long max_pivots = 100000);

// Zero-sum game with payoff[j][k] paid to the column player, who maximizes.
// value = max_col min_row = min_row max_col.
struct GameSolution {
  double value = 0.0;
  Vector row_strategy;     // minimizer over rows
  Vector column_strategy;  // maximizer over columns
  long pivots = 0;
};

GameSolution solve_matrix_game(const Matrix& payoff);

}  // namespace latfact
