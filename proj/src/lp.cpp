#include <algorithm>
#include <cmath>
#include <numeric>

#include "latfact/kernels.hpp"
#include "latfact/lp.hpp"

namespace latfact {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr int kDegenerateStreak = 50;

class Tableau {
 public:
  Tableau(const Matrix& a, const Vector& b, const Vector& c)
      : m_(a.rows), n_(a.cols), width_(n_ + 1), d_(m_ + 1, width_), basis_(m_), nonbasis_(n_) {
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) d_(i, j) = a(i, j);
      d_(i, n_) = b[i];
      basis_[i] = n_ + i;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      d_(m_, j) = -c[j];
      nonbasis_[j] = j;
    }
  }

  LpResult run(long max_pivots) {
    LpResult result;
    int degenerate = 0;
    while (true) {
      const bool bland = degenerate >= kDegenerateStreak;
      const std::ptrdiff_t s = entering(bland);
      if (s < 0) break;
      const std::ptrdiff_t r = leaving(static_cast<std::size_t>(s));
      if (r < 0) {
        result.status = LpStatus::unbounded;
        return finish(result);
      }
      if (result.pivots >= max_pivots) {
        result.status = LpStatus::iteration_limit;
        return finish(result);
      }
      const bool was_degenerate = d_(r, n_) <= kPivotEps;
      pivot(static_cast<std::size_t>(r), static_cast<std::size_t>(s));
      ++result.pivots;
      degenerate = was_degenerate ? degenerate + 1 : 0;
    }
    return finish(result);
  }

 private:
  std::ptrdiff_t entering(bool bland) const {
    std::ptrdiff_t s = -1;
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = d_(m_, j);
      if (v >= -kPivotEps) continue;
      if (s < 0) {
        s = static_cast<std::ptrdiff_t>(j);
        continue;
      }
      const double best = d_(m_, s);
      if (bland ? nonbasis_[j] < nonbasis_[s] : (v < best || (v == best && nonbasis_[j] < nonbasis_[s])))
        s = static_cast<std::ptrdiff_t>(j);
    }
    return s;
  }

  std::ptrdiff_t leaving(std::size_t s) const {
    std::ptrdiff_t r = -1;
    double best = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double coef = d_(i, s);
      if (coef <= kPivotEps) continue;
      const double ratio = d_(i, n_) / coef;
      if (r < 0 || ratio < best || (ratio == best && basis_[i] < basis_[r])) {
        r = static_cast<std::ptrdiff_t>(i);
        best = ratio;
      }
    }
    return r;
  }

  void pivot(std::size_t r, std::size_t s) {
    double* pivot_row = d_.row(r).data();
    const double inv = 1.0 / pivot_row[s];
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      double* row = d_.row(i).data();
      const double factor = row[s] * inv;
      if (std::abs(factor) <= 0.0) continue;
      kernels::axpy(-factor, pivot_row, row, width_);
      row[s] = -factor;
    }
    for (std::size_t j = 0; j < width_; ++j) pivot_row[j] *= inv;
    pivot_row[s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  LpResult& finish(LpResult& result) {
    result.x.assign(n_, 0.0);
    result.duals.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) result.x[basis_[i]] = std::max(d_(i, n_), 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      if (nonbasis_[j] >= n_) result.duals[nonbasis_[j] - n_] = std::max(d_(m_, j), 0.0);
    result.value = d_(m_, n_);
    return result;
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t width_;
  Matrix d_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nonbasis_;
};

}  // namespace

LpResult solve_packing_lp(const Matrix& a, const Vector& b, const Vector& c, long max_pivots) {
  if (b.size() != a.rows || c.size() != a.cols) throw InputError("packing LP: dimension mismatch");
  require_finite(a.data, "packing LP matrix");
  require_finite(b, "packing LP bounds");
  require_finite(c, "packing LP objective");
  for (double v : b)
    if (v < 0.0) throw InputError("packing LP: bounds must be nonnegative");
  Tableau tableau(a, b, c);
  return tableau.run(max_pivots);
}

GameSolution solve_matrix_game(const Matrix& payoff) {
  if (payoff.rows == 0 || payoff.cols == 0) throw InputError("matrix game: empty payoff");
  require_finite(payoff.data, "matrix game payoff");
  const double low = *std::min_element(payoff.data.begin(), payoff.data.end());
  const double high = *std::max_element(payoff.data.begin(), payoff.data.end());
  // Rescale so the shifted payoff lies in [1, 2]; the LP below then has a
  // well-conditioned feasible origin.
  const double span = std::max(high - low, 1e-300);
  const double scale = high > low ? 1.0 / span : 1.0;
  const double shift = 1.0 - low * scale;

  // Row player: y = lambda / v', maximize 1^T y s.t. P'^T y <= 1.
  Matrix a(payoff.cols, payoff.rows);
  for (std::size_t j = 0; j < payoff.rows; ++j)
    for (std::size_t k = 0; k < payoff.cols; ++k) a(k, j) = payoff(j, k) * scale + shift;
  const LpResult lp = solve_packing_lp(a, Vector(payoff.cols, 1.0), Vector(payoff.rows, 1.0));
  if (lp.status != LpStatus::optimal) throw std::runtime_error("matrix game: simplex did not reach optimality");

  GameSolution game;
  game.pivots = lp.pivots;
  const double ysum = std::accumulate(lp.x.begin(), lp.x.end(), 0.0);
  const double zsum = std::accumulate(lp.duals.begin(), lp.duals.end(), 0.0);
  game.value = (1.0 / ysum - shift) / scale;
  game.row_strategy = lp.x;
  for (double& v : game.row_strategy) v /= ysum;
  game.column_strategy = lp.duals;
  for (double& v : game.column_strategy) v /= zsum;
  return game;
}

}  // namespace latfact
