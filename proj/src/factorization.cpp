#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "latfact/factorization.hpp"
#include "latfact/kernels.hpp"
#include "latfact/lp.hpp"
#include "latfact/search.hpp"

namespace latfact {

namespace {

constexpr int kOracleRestarts = 16;
constexpr int kOracleIterations = 300;
constexpr std::size_t kEnumerateSigns = 12;
constexpr std::size_t kRandomSigns = 64;
constexpr int kColumnRounds = 60;
constexpr double kMassFloor = 1e-15;

std::vector<Vector> sign_patterns(std::size_t n, std::uint64_t seed) {
  std::vector<Vector> out;
  if (n <= kEnumerateSigns) {
    const std::size_t count = std::size_t{1} << (n - 1);
    for (std::size_t mask = 0; mask < count; ++mask) {
      Vector s(n, 1.0);
      for (std::size_t w = 1; w < n; ++w)
        if ((mask >> (w - 1)) & 1U) s[w] = -1.0;
      out.push_back(std::move(s));
    }
    return out;
  }
  out.emplace_back(n, 1.0);
  auto rng = make_rng(seed, 0x519);
  std::bernoulli_distribution coin;
  for (std::size_t k = 1; k < kRandomSigns; ++k) {
    Vector s(n, 1.0);
    for (std::size_t w = 1; w < n; ++w) s[w] = coin(rng) ? -1.0 : 1.0;
    out.push_back(std::move(s));
  }
  return out;
}

Vector start_magnitudes(std::size_t n, int restart, std::uint64_t seed) {
  if (restart == 0) return Vector(n, 1.0);
  if (static_cast<std::size_t>(restart) <= n) {
    Vector m(n, 0.0);
    m[restart - 1] = 1.0;
    return m;
  }
  auto rng = make_rng(seed, static_cast<std::uint64_t>(restart));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector m(n);
  for (double& v : m) v = unit(rng);
  return m;
}

// Projected ascent of a scale-invariant objective over m >= 0, renormalizing
// each trial point by `scale`. Only improving steps are accepted.
struct MagnitudeProblem {
  std::function<double(const Vector&)> value;
  std::function<void(const Vector&, Vector&)> direction;
  std::function<double(const Vector&)> scale;
};

Vector ascend(const MagnitudeProblem& problem, Vector m, int iterations, double& value) {
  const std::size_t n = m.size();
  const double s0 = problem.scale(m);
  if (!(s0 > 0.0)) {
    value = -kInfinity;
    return m;
  }
  for (double& v : m) v /= s0;
  value = problem.value(m);
  double step = 0.25;
  Vector d(n);
  Vector trial(n);
  for (int it = 0; it < iterations && step > 1e-12; ++it) {
    problem.direction(m, d);
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, std::abs(v));
    if (!(dmax > 0.0) || !std::isfinite(dmax)) break;
    for (std::size_t w = 0; w < n; ++w) trial[w] = std::max(m[w] + step * d[w] / dmax, 0.0);
    const double sc = problem.scale(trial);
    if (!(sc > 0.0)) {
      step *= 0.5;
      continue;
    }
    for (double& v : trial) v /= sc;
    const double v = problem.value(trial);
    if (v > value) {
      m.swap(trial);
      value = v;
      step = std::min(step * 2.0, 1.0);
    } else {
      step *= 0.5;
    }
  }
  return m;
}

struct SignedImage {
  const LinearOperator& t;
  double q;

  double power(const Vector& sigma, const Vector& m, Vector& f) const {
    for (std::size_t w = 0; w < m.size(); ++w) f[w] = sigma[w] * m[w];
    return safe_pow(t.image_norm(f), q);
  }

  // Gradient of ||T(sigma m)||^q with respect to m.
  void gradient(const Vector& sigma, const Vector& m, Vector& out) const {
    Vector f(m.size());
    for (std::size_t w = 0; w < m.size(); ++w) f[w] = sigma[w] * m[w];
    const Vector y = t.apply(f);
    Vector gy(y.size());
    t.codomain().power_gradient(y, q, gy);
    const Matrix& a = t.matrix();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < a.rows; ++i)
      if (gy[i] != 0.0) kernels::axpy(gy[i], a.row(i).data(), out.data(), a.cols);
    for (std::size_t w = 0; w < m.size(); ++w) out[w] *= sigma[w];
  }
};

// Gradient of ||m||_S^q for m >= 0.
void s_power_gradient(const SNormSpace& s, const Vector& m, Vector& out) {
  const auto& e = s.exponents();
  const double p = e.p();
  const double qp = e.q_over_p();
  const auto mu = s.base().measure().weights();
  const Matrix& h = s.atom_matrix();
  Vector inner(h.rows);
  s.inner_integrals(m, inner);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < h.rows; ++k) {
    const double coeff = s.xi().masses()[k] * safe_pow(inner[k], qp - 1.0);
    if (coeff != 0.0) kernels::axpy(coeff, h.row(k).data(), out.data(), h.cols);
  }
  for (std::size_t w = 0; w < m.size(); ++w) out[w] *= e.q() * safe_pow(m[w], p - 1.0) * mu[w];
}

struct SearchPoint {
  Vector f;
  double value = -kInfinity;
};

// Runs `solve(sigma, start)` for every sign pattern and restart; the reduction
// is index-ordered so the result does not depend on the thread count.
SearchPoint sign_magnitude_search(std::size_t n, std::uint64_t seed,
                                  const std::function<SearchPoint(const Vector&, Vector)>& solve) {
  const auto patterns = sign_patterns(n, seed);
  const std::size_t tasks = patterns.size() * kOracleRestarts;
  std::vector<SearchPoint> results(tasks);
  parallel_for(tasks, [&](std::size_t k) {
    const std::size_t pattern = k / kOracleRestarts;
    const int restart = static_cast<int>(k % kOracleRestarts);
    results[k] = solve(patterns[pattern], start_magnitudes(n, restart, derive_seed(seed, pattern)));
  });
  SearchPoint best;
  for (auto& r : results)
    if (r.value > best.value) best = std::move(r);
  return best;
}

int oracle_iterations(const SearchBudget& budget) { return std::max(kOracleIterations, 5 * budget.sweeps); }

Vector normalized_in(const LatticeNorm& x, Vector f) {
  const double nf = x.evaluate(f);
  if (nf > 0.0)
    for (double& v : f) v /= nf;
  return f;
}

DiscreteRadonMeasure measure_from_game(const std::vector<DualVector>& columns, const Vector& strategy) {
  std::vector<DualVector> atoms;
  Vector masses;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (strategy[k] > kMassFloor) {
      atoms.push_back(columns[k]);
      masses.push_back(strategy[k]);
    }
  }
  if (atoms.empty()) {
    const auto it = std::max_element(strategy.begin(), strategy.end());
    atoms.push_back(columns[static_cast<std::size_t>(it - strategy.begin())]);
    masses.push_back(1.0);
  }
  return DiscreteRadonMeasure(std::move(atoms), std::move(masses)).normalized_copy();
}

// (sum_w |f_w|^p h_w mu_w)^{q/p}
double phi(const Vector& f, const Vector& h, std::span<const double> mu, double p, double qp) {
  double s = 0.0;
  for (std::size_t w = 0; w < f.size(); ++w) s += safe_pow(std::abs(f[w]), p) * h[w] * mu[w];
  return safe_pow(s, qp);
}

class CuttingPlane {
 public:
  CuttingPlane(const LinearOperator& t, const ExponentTriple& e, std::vector<DualVector> grid)
      : t_(t), e_(e), ball_(t.domain(), e.p()), mu_(t.domain().measure().weights()), columns_(std::move(grid)) {}

  void add_witness(Vector f) {
    Vector row(columns_.size());
    for (std::size_t k = 0; k < columns_.size(); ++k) row[k] = phi(f, columns_[k].h, mu_, e_.p(), e_.q_over_p());
    phi_.push_back(std::move(row));
    image_.push_back(safe_pow(t_.image_norm(f), e_.q()));
    witnesses_.push_back(std::move(f));
  }

  void add_column(DualVector h) {
    for (std::size_t j = 0; j < witnesses_.size(); ++j)
      phi_[j].push_back(phi(witnesses_[j], h.h, mu_, e_.p(), e_.q_over_p()));
    columns_.push_back(std::move(h));
  }

  GameSolution solve(double cq) const {
    Matrix payoff(witnesses_.size(), columns_.size());
    for (std::size_t j = 0; j < witnesses_.size(); ++j)
      for (std::size_t k = 0; k < columns_.size(); ++k) payoff(j, k) = cq * phi_[j][k] - image_[j];
    return solve_matrix_game(payoff);
  }

  // Best response of the column player to the row strategy: the h_M of the
  // separation argument, found by conditional-gradient ascent.
  DualMaximum best_column(const Vector& lambda) const {
    const PowerFunctional psi(t_.domain(), e_.p(), e_.q_over_p(), witnesses_, lambda);
    std::vector<std::size_t> order(columns_.size());
    std::iota(order.begin(), order.end(), 0);
    Vector score(columns_.size(), 0.0);
    for (std::size_t k = 0; k < columns_.size(); ++k)
      for (std::size_t j = 0; j < witnesses_.size(); ++j) score[k] += lambda[j] * phi_[j][k];
    const std::size_t keep = std::min<std::size_t>(3, order.size());
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](std::size_t a, std::size_t b) {
      return score[a] > score[b] || (score[a] == score[b] && a < b);
    });
    std::vector<Vector> starts{ball_.positive_unit().h};
    for (std::size_t i = 0; i < keep; ++i) starts.push_back(columns_[order[i]].h);
    return maximize_power_functional(ball_, psi, starts);
  }

  double weighted_image(const Vector& lambda) const {
    double s = 0.0;
    for (std::size_t j = 0; j < image_.size(); ++j) s += lambda[j] * image_[j];
    return s;
  }

  const std::vector<DualVector>& columns() const { return columns_; }
  const Family& witnesses() const { return witnesses_; }

 private:
  const LinearOperator& t_;
  ExponentTriple e_;
  DualBall ball_;
  std::span<const double> mu_;
  std::vector<DualVector> columns_;
  Family witnesses_;
  std::vector<Vector> phi_;
  Vector image_;
};

}  // namespace

// ---------------------------------------------------------------- oracle

Violation violation_oracle(const LinearOperator& t, const SNormSpace& s, double c, const SearchBudget& budget,
                           std::uint64_t seed) {
  if (!(c >= 0.0)) throw InputError("violation oracle: C must be nonnegative");
  if (s.dimension() != t.cols()) throw InputError("violation oracle: S-space and operator dimensions differ");
  const std::size_t n = t.cols();
  const double q = s.exponents().q();
  const double cq = safe_pow(c, q);
  const LatticeNorm& x = t.domain();
  const SignedImage image{t, q};
  const int iterations = oracle_iterations(budget);

  auto solve = [&](const Vector& sigma, Vector start) {
    Vector f(n);
    Vector gs(n);
    MagnitudeProblem problem;
    problem.value = [&](const Vector& m) {
      Vector g(n);
      return image.power(sigma, m, g) - cq * safe_pow(s.evaluate(m), q);
    };
    problem.direction = [&](const Vector& m, Vector& d) {
      Vector local(n);
      image.gradient(sigma, m, d);
      s_power_gradient(s, m, local);
      for (std::size_t w = 0; w < n; ++w) d[w] -= cq * local[w];
    };
    problem.scale = [&](const Vector& m) { return x.evaluate(m); };
    double value = 0.0;
    Vector m = ascend(problem, std::move(start), iterations, value);
    for (std::size_t w = 0; w < n; ++w) f[w] = sigma[w] * m[w];
    return SearchPoint{std::move(f), value};
  };

  SearchPoint best = sign_magnitude_search(n, seed, solve);
  Violation out;
  out.f = std::move(best.f);
  out.value = best.value;
  out.residual = t.image_norm(out.f) - c * s.evaluate(out.f);
  return out;
}

double extension_norm_estimate(const LinearOperator& t, const SNormSpace& s, const SearchBudget& budget,
                               std::uint64_t seed) {
  if (!s.saturated()) throw DomainError("extension norm: S-functional is not a norm (xi not saturated)");
  if (s.dimension() != t.cols()) throw InputError("extension norm: S-space and operator dimensions differ");
  if (t.is_zero()) return 0.0;
  const std::size_t n = t.cols();
  const double q = s.exponents().q();
  const SignedImage image{t, q};
  const int iterations = oracle_iterations(budget);

  auto solve = [&](const Vector& sigma, Vector start) {
    MagnitudeProblem problem;
    problem.value = [&](const Vector& m) {
      Vector g(n);
      return std::pow(image.power(sigma, m, g), 1.0 / q);
    };
    problem.direction = [&](const Vector& m, Vector& d) {
      Vector g(n);
      const double top = image.power(sigma, m, g);
      const double bottom = safe_pow(s.evaluate(m), q);
      Vector local(n);
      image.gradient(sigma, m, d);
      s_power_gradient(s, m, local);
      for (std::size_t w = 0; w < n; ++w) {
        d[w] = (top > 0.0 ? d[w] / top : d[w]) - local[w] / bottom;
      }
    };
    problem.scale = [&](const Vector& m) { return s.evaluate(m); };
    double value = 0.0;
    Vector m = ascend(problem, std::move(start), iterations, value);
    Vector f(n);
    for (std::size_t w = 0; w < n; ++w) f[w] = sigma[w] * m[w];
    return SearchPoint{std::move(f), value};
  };
  return std::max(0.0, sign_magnitude_search(n, seed, solve).value);
}

// ---------------------------------------------------------------- solver

SNormSpace certificate_space(const DominationCertificate& cert, const LatticeNorm& x) {
  return SNormSpace(x, ExponentTriple(cert.p, cert.q), cert.xi);
}

DominationCertificate find_domination_measure(const LinearOperator& t, const ExponentTriple& e,
                                              std::vector<DualVector> grid, const DominationOptions& options) {
  if (grid.empty()) throw InputError("domination: empty dual grid");
  if (!(options.tol > 0.0)) throw InputError("domination: tol must be positive");
  if (options.constant && !(*options.constant >= 0.0)) throw InputError("domination: C must be nonnegative");
  const LatticeNorm& x = t.domain();
  const std::size_t n = x.dimension();
  for (const auto& g : grid) require_dimension(g.h, n, "dual grid point");
  x.pth_power(e.p());
  const DualBall ball(x, e.p());
  const double q = e.q();
  const double tol = options.tol;

  DominationCertificate cert;
  cert.p = e.p();
  cert.q = q;

  if (t.is_zero()) {
    cert.xi = DiscreteRadonMeasure::dirac(ball.positive_unit());
    cert.constant = options.constant.value_or(0.0);
    cert.converged = true;
    return cert;
  }

  const bool auto_c = !options.constant;
  double c = auto_c ? pq_concavity_estimate(t, e, options.budget, derive_seed(options.seed, 0x10)).value * (1.0 + tol)
                    : *options.constant;

  CuttingPlane plane(t, e, std::move(grid));
  for (std::size_t w = 0; w < n; ++w) {
    Vector f(n, 0.0);
    f[w] = 1.0;
    plane.add_witness(normalized_in(x, std::move(f)));
  }
  plane.add_witness(normalized_in(x, Vector(n, 1.0)));
  {
    const auto op = operator_norm_estimate(t, options.budget, derive_seed(options.seed, 0x11));
    if (!op.witness.empty()) plane.add_witness(normalized_in(x, op.witness.front()));
  }

  std::ostringstream diag;
  std::optional<double> previous;
  GameSolution game;
  bool done = false;
  for (int iteration = 0; iteration < options.max_iterations && !done; ++iteration) {
    cert.iterations = iteration + 1;
    const double cq = safe_pow(c, q);
    const double scale = std::max(1.0, cq);

    game = plane.solve(cq);
    if (previous && game.value > *previous + 1e-9 * scale)
      throw std::logic_error("domination: game value increased after a witness cut");

    double best_response = 0.0;
    for (int round = 0; round < kColumnRounds; ++round) {
      const DualMaximum column = plane.best_column(game.row_strategy);
      best_response = column.value;
      const double gain = cq * column.value - plane.weighted_image(game.row_strategy);
      if (!(gain > game.value + 1e-12 * scale) || column.h.certified_norm > 1.0 + kDualBallSlack) break;
      plane.add_column(column.h);
      game = plane.solve(cq);
    }
    cert.lp_history.push_back(game.value);

    if (game.value < -tol * cq) {
      const double demand = plane.weighted_image(game.row_strategy);
      const double raised = best_response > 0.0 ? std::pow(demand / best_response, 1.0 / q) : kInfinity;
      if (auto_c && std::isfinite(raised)) {
        c = std::max(c * (1.0 + tol), raised * (1.0 + tol));
        diag << "C raised to " << c << " at iteration " << cert.iterations << "; ";
        previous.reset();
        continue;
      }
      cert.xi = measure_from_game(plane.columns(), game.column_strategy);
      cert.constant = c;
      cert.residual = kInfinity;
      diag << "game value " << game.value << " < 0: C = " << c << " is below the constant the witnesses require";
      cert.diagnostic = diag.str();
      cert.witnesses = plane.witnesses();
      return cert;
    }

    cert.xi = measure_from_game(plane.columns(), game.column_strategy);
    const SNormSpace s(x, e, cert.xi);
    const Violation v = violation_oracle(t, s, c, options.budget, derive_seed(options.seed, 0x100 + iteration));
    cert.residual = std::max(v.residual, 0.0);
    if (v.residual <= tol && v.value <= tol * cq) {
      done = true;
      break;
    }
    plane.add_witness(v.f);
    previous = game.value;
  }

  cert.constant = c;
  cert.witnesses = plane.witnesses();
  cert.converged = done;
  if (!done) diag << "iteration limit reached with residual " << cert.residual;

  const SNormSpace s(x, e, cert.xi);
  if (!s.saturated()) {
    // (1 - eps) xi + eps delta_u dominates (1 - eps) ||.||_S^q, so scaling C by
    // (1 - eps)^{-1/q} keeps every inequality.
    const double eps = tol;
    std::vector<DualVector> atoms = cert.xi.atoms();
    Vector masses = cert.xi.masses();
    for (double& m : masses) m *= 1.0 - eps;
    atoms.push_back(ball.positive_unit());
    masses.push_back(eps);
    cert.xi = DiscreteRadonMeasure(std::move(atoms), std::move(masses)).normalized_copy();
    cert.constant = c * std::pow(1.0 - eps, -1.0 / q);
    cert.mixed = true;
    const SNormSpace repaired(x, e, cert.xi);
    const Violation v =
        violation_oracle(t, repaired, cert.constant, options.budget, derive_seed(options.seed, 0xfff));
    cert.residual = std::max(v.residual, 0.0);
    if (cert.converged && cert.residual > tol) {
      cert.converged = false;
      diag << "residual " << cert.residual << " after saturation repair";
    }
  }
  cert.diagnostic = diag.str();
  return cert;
}

DominationCertificate minimal_domination_constant(const LinearOperator& t, const ExponentTriple& e,
                                                  const std::vector<DualVector>& grid,
                                                  const DominationOptions& options, int steps) {
  DominationOptions opts = options;
  opts.constant.reset();
  DominationCertificate best = find_domination_measure(t, e, grid, opts);
  if (!best.converged || t.is_zero()) return best;
  double lo = operator_norm_estimate(t, options.budget, derive_seed(options.seed, 0x11)).value;
  double hi = best.constant;
  for (int i = 0; i < steps && hi - lo > options.tol * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    opts.constant = mid;
    DominationCertificate cert = find_domination_measure(t, e, grid, opts);
    if (cert.converged) {
      hi = cert.constant;
      best = std::move(cert);
    } else {
      lo = mid;
    }
  }
  return best;
}

// ---------------------------------------------------------------- checks

namespace {

Vector random_direction(std::size_t n, std::mt19937_64& rng, bool sparse) {
  std::normal_distribution<double> normal;
  std::bernoulli_distribution keep(0.5);
  Vector f(n);
  for (double& v : f) v = normal(rng);
  if (sparse) {
    const std::size_t anchor = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    for (std::size_t w = 0; w < n; ++w)
      if (w != anchor && !keep(rng)) f[w] = 0.0;
  }
  return f;
}

}  // namespace

double verify_domination(const DominationCertificate& cert, const LinearOperator& t, const ExponentTriple& e,
                         std::size_t samples, std::uint64_t seed) {
  if (e.p() != cert.p || e.q() != cert.q) throw InputError("verify: exponents differ from the certificate's");
  const LatticeNorm& x = t.domain();
  const SNormSpace s = certificate_space(cert, x);
  const std::size_t n = x.dimension();
  double worst = -kInfinity;
  auto check = [&](const Vector& f) {
    const double nf = x.evaluate(f);
    if (!(nf > 0.0)) return;
    Vector g = f;
    for (double& v : g) v /= nf;
    worst = std::max(worst, t.image_norm(g) - cert.constant * s.evaluate(g));
  };
  for (const auto& f : cert.witnesses) check(f);
  auto rng = make_rng(seed, 0x7e5);
  for (std::size_t i = 0; i < samples; ++i) check(random_direction(n, rng, i % 3 == 2));
  return worst == -kInfinity ? 0.0 : worst;
}

Vector collapse_weight(const DominationCertificate& cert) {
  if (cert.p != cert.q) throw DomainError("collapse weight requires p = q");
  const auto& atoms = cert.xi.atoms();
  if (atoms.empty()) throw InputError("collapse weight: empty measure");
  const double total = cert.xi.total_mass();
  Vector w(atoms.front().h.size(), 0.0);
  for (std::size_t k = 0; k < atoms.size(); ++k)
    kernels::axpy(cert.xi.masses()[k] / total, atoms[k].h.data(), w.data(), w.size());
  return w;
}

KakutaniResult kakutani_equivalence(const LatticeNorm& x, const ExponentTriple& e, std::vector<DualVector> grid,
                                    const DominationOptions& options, std::size_t samples) {
  const LinearOperator identity = LinearOperator::identity(x);
  KakutaniResult result;
  result.certificate = find_domination_measure(identity, e, std::move(grid), options);
  const SNormSpace s = certificate_space(result.certificate, x);
  const std::size_t n = x.dimension();
  result.lower = kInfinity;
  result.upper = 0.0;
  auto probe = [&](const Vector& f) {
    const double sf = s.evaluate(f);
    const double xf = x.evaluate(f);
    if (!(sf > 0.0) || !(xf > 0.0)) return;
    result.lower = std::min(result.lower, xf / sf);
    result.upper = std::max(result.upper, xf / sf);
  };
  for (std::size_t w = 0; w < n; ++w) {
    Vector f(n, 0.0);
    f[w] = 1.0;
    probe(f);
  }
  probe(Vector(n, 1.0));
  for (const auto& f : result.certificate.witnesses) probe(f);
  auto rng = make_rng(options.seed, 0x6a6);
  for (std::size_t i = 0; i < samples; ++i) probe(random_direction(n, rng, i % 3 == 2));
  return result;
}

}  // namespace latfact
