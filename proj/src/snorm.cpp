#include <algorithm>
#include <cmath>
#include <set>

#include "latfact/kernels.hpp"
#include "latfact/snorm.hpp"

namespace latfact {

DiscreteRadonMeasure::DiscreteRadonMeasure(std::vector<DualVector> atoms, Vector masses)
    : atoms_(std::move(atoms)), masses_(std::move(masses)) {
  if (atoms_.size() != masses_.size()) throw InputError("xi: atom and mass counts differ");
  if (atoms_.empty()) throw InputError("xi: needs at least one atom");
  const std::size_t n = atoms_.front().h.size();
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (!std::isfinite(masses_[k]) || masses_[k] <= 0.0) throw InputError("xi: masses must be strictly positive");
    require_dimension(atoms_[k].h, n, "xi atom");
    require_finite(atoms_[k].h, "xi atom");
    for (double v : atoms_[k].h) {
      if (v < 0.0) throw InputError("xi: atoms must be nonnegative");
    }
  }
}

DiscreteRadonMeasure DiscreteRadonMeasure::dirac(DualVector atom) {
  return DiscreteRadonMeasure({std::move(atom)}, {1.0});
}

double DiscreteRadonMeasure::total_mass() const {
  double t = 0.0;
  for (double m : masses_) t += m;
  return t;
}

bool DiscreteRadonMeasure::normalized() const { return std::abs(total_mass() - 1.0) <= 1e-12; }

DiscreteRadonMeasure DiscreteRadonMeasure::normalized_copy() const {
  const double t = total_mass();
  Vector m = masses_;
  for (double& v : m) v /= t;
  return DiscreteRadonMeasure(atoms_, std::move(m));
}

SNormSpace::SNormSpace(LatticeNorm base, ExponentTriple e, DiscreteRadonMeasure xi)
    : base_(std::move(base)), e_(e), xi_(std::move(xi)) {
  const std::size_t n = base_.dimension();
  const DualBall ball(base_, e_.p());
  atoms_ = Matrix(xi_.size(), n);
  for (std::size_t k = 0; k < xi_.size(); ++k) {
    const auto& atom = xi_.atoms()[k];
    require_dimension(atom.h, n, "xi atom");
    const double certified = ball.norm(atom.h);
    if (certified > 1.0 + kDualBallSlack) {
      throw DomainError("xi atom " + std::to_string(k) + " lies outside B+_{(X_p)'} (norm " +
                        std::to_string(certified) + ")");
    }
    std::copy(atom.h.begin(), atom.h.end(), atoms_.row(k).begin());
  }
  saturation_.saturated = true;
  for (std::size_t w = 0; w < n; ++w) {
    bool charged = false;
    for (std::size_t k = 0; k < xi_.size() && !charged; ++k) charged = xi_.masses()[k] > 0.0 && atoms_(k, w) > 0.0;
    if (!charged) {
      saturation_.saturated = false;
      saturation_.witness_atom = w;
      break;
    }
  }
}

void SNormSpace::inner_integrals(std::span<const double> f, std::span<double> out) const {
  const std::size_t n = dimension();
  const auto mu = base_.measure().weights();
  Vector u(n);
  for (std::size_t w = 0; w < n; ++w) u[w] = safe_pow(std::abs(f[w]), e_.p()) * mu[w];
  kernels::gemv(atoms_.data.data(), atoms_.rows, n, u.data(), out.data());
}

double SNormSpace::evaluate(std::span<const double> f) const {
  Vector inner(xi_.size());
  inner_integrals(f, inner);
  const double power = e_.q_over_p();
  double total = 0.0;
  for (std::size_t k = 0; k < inner.size(); ++k) total += xi_.masses()[k] * safe_pow(inner[k], power);
  return safe_pow(total, 1.0 / e_.q());
}

double s_norm(const SNormSpace& space, std::span<const double> f) {
  require_dimension(f, space.dimension(), "s_norm");
  require_finite(f, "s_norm");
  return space.evaluate(f);
}

SaturationResult xi_saturation_check(const SNormSpace& space) { return space.saturation(); }

SNormSpace dirac_space(const LatticeNorm& x, const ExponentTriple& e, const DualVector& g) {
  require_dimension(g.h, x.dimension(), "dirac_space weight");
  for (double v : g.h) {
    if (!(v > 0.0)) throw InputError("dirac_space: g must be strictly positive (a weak unit)");
  }
  const DualBall ball(x, e.p());
  return SNormSpace(x, e, DiscreteRadonMeasure::dirac(ball.certify(g.h)));
}

SNormSpace partition_space(const LatticeNorm& x, const ExponentTriple& e, const DualVector& g,
                           const std::vector<std::vector<std::size_t>>& partition, const Vector& alpha) {
  const std::size_t n = x.dimension();
  require_dimension(g.h, n, "partition_space weight");
  for (double v : g.h) {
    if (!(v > 0.0)) throw InputError("partition_space: g must be strictly positive (a weak unit)");
  }
  if (partition.empty() || partition.size() != alpha.size()) {
    throw InputError("partition_space: need one positive mass per block");
  }
  std::set<std::size_t> seen;
  for (const auto& block : partition) {
    if (block.empty()) throw InputError("partition_space: empty block");
    for (std::size_t w : block) {
      if (w >= n) throw InputError("partition_space: atom index out of range");
      if (!seen.insert(w).second) throw InputError("partition_space: blocks overlap");
    }
  }
  if (seen.size() != n) throw InputError("partition_space: blocks do not cover every atom");

  const DualBall ball(x, e.p());
  std::vector<DualVector> atoms;
  for (const auto& block : partition) {
    Vector h(n, 0.0);
    for (std::size_t w : block) h[w] = g.h[w];
    atoms.push_back(ball.certify(std::move(h)));
  }
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InputError("partition_space: masses must be positive");
  }
  return SNormSpace(x, e, DiscreteRadonMeasure(std::move(atoms), alpha));
}

InclusionReport inclusion_bound_check(const SNormSpace& space, std::size_t samples, std::uint64_t seed) {
  InclusionReport report;
  report.bound = std::pow(space.xi().total_mass(), 1.0 / space.exponents().q());
  auto rng = make_rng(seed, 0);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const std::size_t n = space.dimension();
  Vector f(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (double& v : f) v = dist(rng);
    // Sparse draws probe the faces of the positive cone as well.
    if (s % 3 == 1) {
      for (double& v : f) {
        if (dist(rng) < 0.0) v = 0.0;
      }
    }
    const double nx = space.base().evaluate(f);
    if (nx <= 0.0) continue;
    ++report.samples;
    report.max_ratio = std::max(report.max_ratio, space.evaluate(f) / nx);
  }
  report.within_bound = report.max_ratio <= report.bound + 1e-9;
  return report;
}

}  // namespace latfact
