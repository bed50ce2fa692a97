#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "latfact/constants.hpp"
#include "latfact/kernels.hpp"

namespace latfact {

namespace {

constexpr int kAscentIterations = 500;
constexpr double kAscentRelTol = 1e-13;
constexpr double kMaxExtrapolation = 64.0;

double lq_norm(std::span<const double> v, double q) {
  double s = 0.0;
  for (double x : v) s += safe_pow(std::abs(x), q);
  return safe_pow(s, 1.0 / q);
}

bool family_is_zero(const Family& family) {
  for (const auto& f : family)
    for (double v : f)
      if (v != 0.0) return false;
  return true;
}

void check_family(const Family& family, std::size_t n, const char* what) {
  if (family.empty()) throw InputError(std::string(what) + ": empty family");
  for (const auto& f : family) {
    require_dimension(f, n, what);
    require_finite(f, what);
  }
}

double divide_or_zero(double num, double den) {
  if (den <= 0.0) return 0.0;
  return num / den;
}

// Largest eigenvalue of the Gram matrix G_ij = sum_w a_i(w) a_j(w) mu_w.
double gram_top_eigenvalue(const Matrix& a, std::span<const double> mu) {
  const std::size_t m = a.rows;
  Eigen::MatrixXd g(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t w = 0; w < a.cols; ++w) s += a(i, w) * a(j, w) * mu[w];
      g(i, j) = g(j, i) = s;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
  return std::max(solver.eigenvalues().maxCoeff(), 0.0);
}

// Conditional-gradient ascent of a convex homogeneous objective over a unit
// ball. Each step moves to the linear maximizer target(x), then keeps doubling
// the step along target(x) - x (renormalized) while the objective improves;
// plain steps crawl when the top of the objective is nearly flat.
double ball_ascent(Vector& x, const std::function<double(const Vector&)>& value,
                   const std::function<bool(const Vector&, Vector&)>& target,
                   const std::function<bool(Vector&)>& normalize, int iterations) {
  double v = value(x);
  Vector y(x.size());
  Vector z(x.size());
  Vector best(x.size());
  for (int it = 0; it < iterations; ++it) {
    if (!target(x, y)) break;
    best = y;
    double bv = value(y);
    for (double t = 2.0; t <= kMaxExtrapolation; t *= 2.0) {
      for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + t * (y[i] - x[i]);
      if (!normalize(z)) break;
      const double vz = value(z);
      if (!(vz > bv)) break;
      best = z;
      bv = vz;
    }
    if (!(bv > v * (1.0 + kAscentRelTol)) && !(v <= 0.0 && bv > 0.0)) break;
    x.swap(best);
    v = bv;
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------- codomain

CodomainNorm CodomainNorm::euclidean(std::size_t d) {
  if (d == 0) throw InputError("codomain dimension must be positive");
  return CodomainNorm(d);
}

CodomainNorm CodomainNorm::lattice(LatticeNorm x) { return CodomainNorm(std::move(x)); }

std::size_t CodomainNorm::dimension() const {
  if (const auto* d = std::get_if<std::size_t>(&rep_)) return *d;
  return std::get<LatticeNorm>(rep_).dimension();
}

double CodomainNorm::evaluate(std::span<const double> y) const {
  if (is_euclidean()) return std::sqrt(kernels::dot(y.data(), y.data(), y.size()));
  return as_lattice()->evaluate(y);
}

void CodomainNorm::power_gradient(std::span<const double> y, double q, std::span<double> out) const {
  const double n = evaluate(y);
  if (n <= 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  if (is_euclidean()) {
    const double scale = q * safe_pow(n, q - 2.0);
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = scale * y[i];
    return;
  }
  const LatticeNorm& x = *as_lattice();
  if (const auto* l = x.as_lebesgue()) {
    const auto w = x.measure().weights();
    const double scale = q * safe_pow(n, q - l->s);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double mag = safe_pow(std::abs(y[i]), l->s - 1.0);
      out[i] = scale * std::copysign(mag, y[i]) * w[i];
      if (y[i] == 0.0 && l->s > 1.0) out[i] = 0.0;
    }
    return;
  }
  Vector probe(y.begin(), y.end());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double step = 1e-7 * std::max(1.0, std::abs(y[i]));
    probe[i] = y[i] + step;
    const double up = safe_pow(x.evaluate(probe), q);
    probe[i] = y[i] - step;
    const double down = safe_pow(x.evaluate(probe), q);
    probe[i] = y[i];
    out[i] = (up - down) / (2.0 * step);
  }
}

std::string CodomainNorm::describe() const {
  if (const auto* d = std::get_if<std::size_t>(&rep_)) return "euclidean l^2 of dimension " + std::to_string(*d);
  return as_lattice()->describe();
}

// ---------------------------------------------------------------- operator

LinearOperator::LinearOperator(Matrix matrix, LatticeNorm domain, CodomainNorm codomain)
    : matrix_(std::move(matrix)), domain_(std::move(domain)), codomain_(std::move(codomain)) {
  if (matrix_.cols != domain_.dimension()) throw InputError("operator: matrix columns must match domain atoms");
  if (matrix_.rows != codomain_.dimension()) throw InputError("operator: matrix rows must match codomain");
  require_finite(matrix_.data, "operator matrix");
}

LinearOperator LinearOperator::identity(const LatticeNorm& x) {
  const std::size_t n = x.dimension();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return LinearOperator(std::move(m), x, CodomainNorm::lattice(x));
}

bool LinearOperator::is_zero() const {
  return std::all_of(matrix_.data.begin(), matrix_.data.end(), [](double v) { return v == 0.0; });
}

void LinearOperator::apply(std::span<const double> f, std::span<double> out) const {
  kernels::gemv(matrix_.data.data(), matrix_.rows, matrix_.cols, f.data(), out.data());
}

Vector LinearOperator::apply(std::span<const double> f) const {
  require_dimension(f, cols(), "operator argument");
  Vector out(rows());
  apply(f, out);
  return out;
}

double LinearOperator::image_norm(std::span<const double> f) const {
  Vector out(rows());
  apply(f, out);
  return codomain_.evaluate(out);
}

LinearOperator LinearOperator::with_domain(LatticeNorm domain) const {
  return LinearOperator(matrix_, std::move(domain), codomain_);
}

// ---------------------------------------------------------------- power functional

PowerFunctional::PowerFunctional(const LatticeNorm& x, double p, double power, const Family& family, Vector weights)
    : n_(x.dimension()), power_(power), weights_(std::move(weights)) {
  if (weights_.size() != family.size()) throw InputError("power functional: one weight per family member");
  const auto mu = x.measure().weights();
  pth_ = Matrix(family.size(), n_);
  pth_mu_ = Matrix(family.size(), n_);
  for (std::size_t j = 0; j < family.size(); ++j) {
    require_dimension(family[j], n_, "power functional member");
    for (std::size_t w = 0; w < n_; ++w) {
      pth_(j, w) = safe_pow(std::abs(family[j][w]), p);
      pth_mu_(j, w) = pth_(j, w) * mu[w];
    }
  }
}

PowerFunctional::PowerFunctional(const LatticeNorm& x, double p, double power, const Family& family)
    : PowerFunctional(x, p, power, family, Vector(family.size(), 1.0)) {}

double PowerFunctional::value(std::span<const double> h) const {
  double total = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const double inner = kernels::dot(pth_mu_.row(j).data(), h.data(), n_);
    total += weights_[j] * safe_pow(inner, power_);
  }
  return total;
}

Vector PowerFunctional::gradient(std::span<const double> h) const {
  Vector c(n_, 0.0);
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    const double inner = kernels::dot(pth_mu_.row(j).data(), h.data(), n_);
    const double scale = weights_[j] * power_ * safe_pow(inner, power_ - 1.0);
    if (scale != 0.0) kernels::axpy(scale, pth_.row(j).data(), c.data(), n_);
  }
  return c;
}

void PowerFunctional::values(const Matrix& grid, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  Vector inner(grid.rows);
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    kernels::gemv(grid.data.data(), grid.rows, grid.cols, pth_mu_.row(j).data(), inner.data());
    for (std::size_t k = 0; k < grid.rows; ++k) out[k] += weights_[j] * safe_pow(inner[k], power_);
  }
}

DualMaximum maximize_power_functional(const DualBall& ball, const PowerFunctional& psi,
                                      const std::vector<Vector>& starts, int iterations) {
  DualMaximum best;
  bool have = false;
  auto value_of = [&](const Vector& h) { return psi.value(h); };
  auto target = [&](const Vector& h, Vector& out) {
    out = ball.argmax(psi.gradient(h));
    return true;
  };
  auto normalize = [&](Vector& h) {
    for (double& v : h) v = std::max(v, 0.0);
    const double nh = ball.norm(h);
    if (!(nh > 0.0)) return false;
    for (double& v : h) v /= nh;
    return true;
  };
  for (const auto& start : starts) {
    Vector h = start;
    const double value = ball_ascent(h, value_of, target, normalize, iterations);
    if (!have || value > best.value) {
      best.h.h = std::move(h);
      best.value = value;
      have = true;
    }
  }
  best.h = ball.certify(std::move(best.h.h));
  return best;
}

Matrix grid_matrix(const std::vector<DualVector>& grid) {
  if (grid.empty()) return Matrix();
  Matrix m(grid.size(), grid.front().h.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    require_dimension(grid[k].h, m.cols, "grid point");
    std::copy(grid[k].h.begin(), grid[k].h.end(), m.row(k).begin());
  }
  return m;
}

// ---------------------------------------------------------------- lemma sides

FamilySupResult family_sup_lhs(const LatticeNorm& x, const ExponentTriple& e, const Family& family) {
  const std::size_t n = x.dimension();
  check_family(family, n, "family_sup_lhs");
  const double p = e.p();
  const double q = e.q();

  FamilySupResult result;
  {
    double s = 0.0;
    for (const auto& f : family) s += safe_pow(x.evaluate(f), q);
    result.upper_bound = safe_pow(s, 1.0 / q);
  }
  if (family_is_zero(family)) {
    result.exact = true;
    return result;
  }
  if (e.r_infinite()) {
    // beta = (1, ..., 1) is optimal by lattice monotonicity.
    result.value = lattice_power_sum_norm(x, family, p);
    result.exact = true;
    return result;
  }
  const LatticeNorm xp = x.pth_power(p);
  const auto* lp = xp.as_lebesgue();
  if (lp != nullptr && lp->s == 1.0) {
    // X_p = L^1: the sup is linear in alpha and equals the l^{q/p} norm.
    result.value = result.upper_bound;
    result.exact = true;
    return result;
  }

  const auto mu = x.measure().weights();
  const std::size_t m = family.size();
  Matrix g(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t w = 0; w < n; ++w) g(i, w) = safe_pow(std::abs(family[i][w]), p);
  if (lp != nullptr && lp->s == 2.0 && e.q_over_p() == 2.0) {
    // X_p = L^2 and alpha ranges over the l^2 ball: the top eigenvalue of a
    // nonnegative Gram matrix, with a nonnegative Perron vector.
    result.value = std::min(safe_pow(gram_top_eigenvalue(g, mu), 0.5 / p), result.upper_bound);
    result.exact = true;
    return result;
  }

  // Maximize the convex map alpha -> || sum alpha_i |f_i|^p ||_{X_p} over the
  // positive unit ball of l^{r/p} by conditional gradient steps.
  const double rho = e.r_over_p();
  const double rho_dual = e.q_over_p();

  Vector u(n);
  auto combine = [&](std::span<const double> alpha) {
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (alpha[i] != 0.0) kernels::axpy(alpha[i], g.row(i).data(), u.data(), n);
  };
  auto objective = [&](std::span<const double> alpha) {
    combine(alpha);
    return xp.evaluate(u);
  };
  auto gradient = [&](std::span<const double> alpha, Vector& grad) {
    if (lp != nullptr) {
      combine(alpha);
      const double total = xp.evaluate(u);
      Vector weight(n);
      for (std::size_t w = 0; w < n; ++w) weight[w] = safe_pow(u[w] / total, lp->s - 1.0) * mu[w];
      for (std::size_t i = 0; i < m; ++i) grad[i] = kernels::dot(g.row(i).data(), weight.data(), n);
      return;
    }
    Vector probe(alpha.begin(), alpha.end());
    for (std::size_t i = 0; i < m; ++i) {
      const double step = 1e-7 * std::max(1.0, std::abs(alpha[i]));
      probe[i] = alpha[i] + step;
      const double up = objective(probe);
      probe[i] = alpha[i] - step;
      const double down = objective(probe);
      probe[i] = alpha[i];
      grad[i] = (up - down) / (2.0 * step);
    }
  };
  auto linear_argmax = [&](const Vector& c, Vector& alpha) {
    const double scale = lq_norm(c, rho_dual);
    if (scale <= 0.0) return false;
    for (std::size_t i = 0; i < m; ++i) alpha[i] = safe_pow(std::max(c[i], 0.0) / scale, rho_dual - 1.0);
    return true;
  };

  std::vector<Vector> starts;
  starts.emplace_back(m, std::pow(static_cast<double>(m), -1.0 / rho));
  {
    Vector norms(m);
    for (std::size_t i = 0; i < m; ++i) norms[i] = safe_pow(x.evaluate(family[i]), p);
    Vector alpha(m);
    if (linear_argmax(norms, alpha)) starts.push_back(alpha);
  }
  for (std::size_t i = 0; i < m; ++i) {
    Vector alpha(m, 0.0);
    alpha[i] = 1.0;
    starts.push_back(std::move(alpha));
  }

  double best = 0.0;
  Vector grad(m);
  auto value_of = [&](const Vector& alpha) { return objective(alpha); };
  auto target = [&](const Vector& alpha, Vector& out) {
    gradient(alpha, grad);
    return linear_argmax(grad, out);
  };
  auto normalize = [&](Vector& alpha) {
    for (double& v : alpha) v = std::max(v, 0.0);
    const double na = lq_norm(alpha, rho);
    if (!(na > 0.0)) return false;
    for (double& v : alpha) v /= na;
    return true;
  };
  for (auto& alpha : starts) best = std::max(best, ball_ascent(alpha, value_of, target, normalize, kAscentIterations));
  result.value = std::min(safe_pow(best, 1.0 / p), result.upper_bound);
  return result;
}

double family_sup_rhs(const LatticeNorm& x, const ExponentTriple& e, const Family& family,
                      const std::vector<DualVector>& grid) {
  check_family(family, x.dimension(), "family_sup_rhs");
  if (grid.empty()) throw InputError("family_sup_rhs: empty grid");
  const PowerFunctional psi(x, e.p(), e.q_over_p(), family);
  const Matrix h = grid_matrix(grid);
  Vector values(h.rows);
  psi.values(h, values);
  const double best = *std::max_element(values.begin(), values.end());
  return safe_pow(best, 1.0 / e.q());
}

DualMaximum dual_family_argmax(const LatticeNorm& x, const ExponentTriple& e, const Family& family,
                               const std::vector<DualVector>& grid) {
  check_family(family, x.dimension(), "dual_family_argmax");
  const DualBall ball(x, e.p());
  const PowerFunctional psi(x, e.p(), e.q_over_p(), family);
  std::vector<Vector> starts;
  starts.push_back(ball.positive_unit().h);
  if (!grid.empty()) {
    const Matrix h = grid_matrix(grid);
    Vector values(h.rows);
    psi.values(h, values);
    std::vector<std::size_t> order(h.rows);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t keep = std::min<std::size_t>(3, order.size());
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
    for (std::size_t i = 0; i < keep; ++i) starts.push_back(grid[order[i]].h);
  }
  return maximize_power_functional(ball, psi, starts);
}

// ---------------------------------------------------------------- weak norm

WeakNorm weak_q_norm(const LatticeNorm& x, double q, const Family& family) {
  const std::size_t n = x.dimension();
  check_family(family, n, "weak_q_norm");
  const std::size_t m = family.size();
  const auto mu = x.measure().weights();
  Matrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t w = 0; w < n; ++w) a(i, w) = family[i][w] * mu[w];

  WeakNorm result;
  if (family_is_zero(family)) {
    result.exact = true;
    return result;
  }
  Vector pairing(m);
  auto evaluate = [&](std::span<const double> h) {
    kernels::gemv(a.data.data(), m, n, h.data(), pairing.data());
    return lq_norm(pairing, q);
  };

  const auto* l = x.as_lebesgue();
  if (l != nullptr && l->s == 1.0 && n <= 20) {
    // Dual ball is the cube [-1, 1]^n; the convex objective peaks at a vertex.
    Vector h(n);
    const std::size_t patterns = std::size_t{1} << (n - 1);
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      for (std::size_t w = 0; w < n; ++w) h[w] = (mask >> w) & 1U ? -1.0 : 1.0;
      result.value = std::max(result.value, evaluate(h));
    }
    result.exact = true;
    return result;
  }

  if (l != nullptr && l->s == 2.0 && q == 2.0) {
    Matrix rows(m, n);
    for (std::size_t i = 0; i < m; ++i) std::copy(family[i].begin(), family[i].end(), rows.row(i).begin());
    result.value = std::sqrt(gram_top_eigenvalue(rows, mu));
    result.exact = true;
    return result;
  }

  const DualBall ball(x, 1.0);
  auto signed_argmax = [&](const Vector& c) {
    Vector mag(n);
    for (std::size_t w = 0; w < n; ++w) mag[w] = std::abs(c[w]);
    Vector h = ball.argmax(mag);
    for (std::size_t w = 0; w < n; ++w) h[w] = std::copysign(h[w], c[w]);
    return h;
  };

  std::vector<Vector> starts;
  for (const auto& f : family) starts.push_back(signed_argmax(f));
  starts.push_back(ball.positive_unit().h);

  auto value_of = [&](const Vector& h) { return evaluate(h); };
  auto target = [&](const Vector& h, Vector& out) {
    evaluate(h);
    Vector c(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double coeff = std::copysign(safe_pow(std::abs(pairing[i]), q - 1.0), pairing[i]);
      if (coeff != 0.0) kernels::axpy(coeff, family[i].data(), c.data(), n);
    }
    out = signed_argmax(c);
    return true;
  };
  auto normalize = [&](Vector& h) {
    Vector mag(n);
    for (std::size_t w = 0; w < n; ++w) mag[w] = std::abs(h[w]);
    const double nh = ball.norm(mag);
    if (!(nh > 0.0)) return false;
    for (double& v : h) v /= nh;
    return true;
  };
  for (auto& h : starts)
    result.value = std::max(result.value, ball_ascent(h, value_of, target, normalize, kAscentIterations));
  return result;
}

// ---------------------------------------------------------------- ratios

double image_q_sum(const LinearOperator& t, double q, const Family& family) {
  double s = 0.0;
  for (const auto& f : family) s += safe_pow(t.image_norm(f), q);
  return safe_pow(s, 1.0 / q);
}

double operator_norm_ratio(const LinearOperator& t, std::span<const double> f) {
  return divide_or_zero(t.image_norm(f), t.domain().evaluate(f));
}

double q_concavity_ratio(const LinearOperator& t, double q, const Family& family) {
  if (family.empty()) return 0.0;
  return divide_or_zero(image_q_sum(t, q, family), lattice_power_sum_norm(t.domain(), family, q));
}

double pq_concavity_ratio(const LinearOperator& t, const ExponentTriple& e, const Family& family) {
  if (family.empty()) return 0.0;
  return divide_or_zero(image_q_sum(t, e.q(), family), family_sup_lhs(t.domain(), e, family).value);
}

double q_summing_ratio(const LinearOperator& t, double q, const Family& family) {
  if (family.empty()) return 0.0;
  return divide_or_zero(image_q_sum(t, q, family), weak_q_norm(t.domain(), q, family).value);
}

// ---------------------------------------------------------------- estimators

namespace {

ConstantEstimate family_estimate(ConstantKind kind, const LinearOperator& t,
                                 const std::function<double(const Family&)>& ratio, const SearchBudget& budget,
                                 std::uint64_t seed) {
  ConstantEstimate est;
  est.kind = kind;
  if (t.is_zero()) return est;
  auto found = search_families(ratio, t.cols(), budget, seed, false);
  est.value = found.value;
  est.budget_used = found.evaluations;
  if (est.value > 0.0) est.witness = std::move(found.family);
  return est;
}

}  // namespace

ConstantEstimate operator_norm_estimate(const LinearOperator& t, const SearchBudget& budget, std::uint64_t seed) {
  ConstantEstimate est;
  est.kind = ConstantKind::operator_norm;
  if (t.is_zero()) return est;
  const std::size_t n = t.cols();
  for (std::size_t i = 0; i < n; ++i) {
    Vector e(n, 0.0);
    e[i] = 1.0;
    const double v = operator_norm_ratio(t, e);
    ++est.budget_used;
    if (v > est.value) {
      est.value = v;
      est.witness = {e};
    }
  }
  SearchBudget singles = budget;
  singles.max_family = 1;
  auto found = search_families([&](const Family& f) { return operator_norm_ratio(t, f.front()); }, n, singles, seed,
                               false);
  est.budget_used += found.evaluations;
  if (found.value > est.value) {
    est.value = found.value;
    est.witness = std::move(found.family);
  }
  return est;
}

ConstantEstimate q_concavity_estimate(const LinearOperator& t, double q, const SearchBudget& budget,
                                      std::uint64_t seed) {
  if (!(q >= 1.0)) throw InputError("q must be >= 1");
  return family_estimate(
      ConstantKind::q_concavity, t, [&](const Family& f) { return q_concavity_ratio(t, q, f); }, budget, seed);
}

ConstantEstimate pq_concavity_estimate(const LinearOperator& t, const ExponentTriple& e,
                                       const SearchBudget& budget, std::uint64_t seed) {
  t.domain().pth_power(e.p());
  return family_estimate(
      ConstantKind::pq_concavity, t, [&](const Family& f) { return pq_concavity_ratio(t, e, f); }, budget, seed);
}

ConstantEstimate q_summing_estimate(const LinearOperator& t, double q, const SearchBudget& budget,
                                    std::uint64_t seed) {
  if (!(q >= 1.0)) throw InputError("q must be >= 1");
  return family_estimate(
      ConstantKind::q_summing, t, [&](const Family& f) { return q_summing_ratio(t, q, f); }, budget, seed);
}

ChainReport constant_chain_report(const LinearOperator& t, const ExponentTriple& e, const SearchBudget& budget,
                                  std::uint64_t seed) {
  const double q = e.q();
  ChainReport report;
  report.operator_norm = operator_norm_estimate(t, budget, derive_seed(seed, 1));
  report.q_concavity = q_concavity_estimate(t, q, budget, derive_seed(seed, 2));
  report.pq_concavity = pq_concavity_estimate(t, e, budget, derive_seed(seed, 3));
  report.q_summing = q_summing_estimate(t, q, budget, derive_seed(seed, 4));

  auto check = [&](std::string name, double lower, double upper) {
    const bool holds = lower <= upper + kChainSlack * std::max(1.0, std::abs(upper));
    report.checks.push_back(ChainCheck{std::move(name), lower, upper, holds});
    report.chain_holds = report.chain_holds && holds;
  };
  auto lift = [](ConstantEstimate& target, double value, const Family& witness) {
    if (value > target.value) {
      target.value = value;
      target.witness = witness;
    }
  };

  const Family op_w = report.operator_norm.witness;
  const Family q_w = report.q_concavity.witness;
  if (!op_w.empty()) {
    const double at_q = q_concavity_ratio(t, q, op_w);
    const double at_pq = pq_concavity_ratio(t, e, op_w);
    const double at_pi = q_summing_ratio(t, q, op_w);
    check("operator_norm witness: ||T|| ratio <= M_q ratio", operator_norm_ratio(t, op_w.front()), at_q);
    check("operator_norm witness: M_q ratio <= M_pq ratio", at_q, at_pq);
    check("operator_norm witness: M_pq ratio <= pi_q ratio", at_pq, at_pi);
    lift(report.q_concavity, at_q, op_w);
    lift(report.pq_concavity, at_pq, op_w);
    lift(report.q_summing, at_pi, op_w);
  }
  if (!q_w.empty()) {
    const double own = q_concavity_ratio(t, q, q_w);
    const double at_pq = pq_concavity_ratio(t, e, q_w);
    const double at_pi = q_summing_ratio(t, q, q_w);
    check("M_q witness: M_q ratio <= M_pq ratio", own, at_pq);
    check("M_q witness: M_pq ratio <= pi_q ratio", at_pq, at_pi);
    lift(report.pq_concavity, at_pq, q_w);
    lift(report.q_summing, at_pi, q_w);
  }
  const Family pq_w = report.pq_concavity.witness;
  if (!pq_w.empty()) {
    const double own = pq_concavity_ratio(t, e, pq_w);
    const double at_pi = q_summing_ratio(t, q, pq_w);
    check("M_pq witness: M_pq ratio <= pi_q ratio", own, at_pi);
    lift(report.q_summing, at_pi, pq_w);
  }
  check("chain: ||T|| <= M_q", report.operator_norm.value, report.q_concavity.value);
  check("chain: M_q <= M_pq", report.q_concavity.value, report.pq_concavity.value);
  check("chain: M_pq <= pi_q", report.pq_concavity.value, report.q_summing.value);
  return report;
}

}  // namespace latfact
