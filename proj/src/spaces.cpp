#include <algorithm>
#include <cmath>
#include <sstream>

#include "latfact/kernels.hpp"
#include "latfact/snorm.hpp"
#include "latfact/spaces.hpp"

namespace latfact {

namespace {

constexpr double kExponentEps = 1e-12;
constexpr std::size_t kMaxEnumeratedAtoms = 12;

// (sum |f_w|^s mu_w)^{1/s}, scaled by max |f| to stay in range.
double lebesgue_norm(std::span<const double> f, std::span<const double> mu, double s) {
  double peak = 0.0;
  for (double v : f) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return 0.0;
  if (s == kInfinity) return peak;
  double sum = 0.0;
  if (s == 1.0) {
    for (std::size_t i = 0; i < f.size(); ++i) sum += std::abs(f[i]) * mu[i];
    return sum;
  }
  for (std::size_t i = 0; i < f.size(); ++i) sum += std::pow(std::abs(f[i]) / peak, s) * mu[i];
  return peak * std::pow(sum, 1.0 / s);
}

// Dual norm over the support of mu; every weight is positive.
double lebesgue_dual_norm(std::span<const double> h, std::span<const double> mu, double s) {
  return lebesgue_norm(h, mu, conjugate_exponent(s));
}

}  // namespace

MeasureSpace::MeasureSpace(Vector weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("measure space needs at least one atom");
  for (double w : weights_) {
    if (!std::isfinite(w) || w <= 0.0) throw InputError("measure weights must be finite and strictly positive");
  }
}

MeasureSpace MeasureSpace::uniform(std::size_t n) { return MeasureSpace(Vector(n, 1.0)); }

double MeasureSpace::total() const {
  double t = 0.0;
  for (double w : weights_) t += w;
  return t;
}

ExponentTriple::ExponentTriple(double p, double q) : p_(p), q_(q) {
  if (!std::isfinite(p) || !std::isfinite(q) || p < 1.0 || q < p) {
    throw InputError("exponents must satisfy 1 <= p <= q < inf");
  }
  if (p == q) {
    r_ = kInfinity;
  } else {
    r_ = 1.0 / (1.0 / p - 1.0 / q);
  }
}

double conjugate_exponent(double s) {
  if (s == 1.0) return kInfinity;
  if (s == kInfinity) return 1.0;
  return s / (s - 1.0);
}

LatticeNorm LatticeNorm::lebesgue(MeasureSpace mu, double s) {
  if (!std::isfinite(s) || s < 1.0) throw InputError("lebesgue exponent s must lie in [1, inf)");
  return LatticeNorm(std::move(mu), WeightedLebesgue{s});
}

LatticeNorm LatticeNorm::from_snorm(std::shared_ptr<const SNormSpace> space) {
  if (!space) throw InputError("null S-space");
  if (!space->saturated()) {
    throw DomainError("S-functional is only a seminorm: atom " +
                      std::to_string(*space->saturation().witness_atom) + " is annihilated by xi");
  }
  MeasureSpace mu = space->base().measure();
  return LatticeNorm(std::move(mu), std::move(space));
}

const SNormSpace* LatticeNorm::as_snorm() const {
  if (const auto* s = std::get_if<std::shared_ptr<const SNormSpace>>(&rep_)) return s->get();
  return nullptr;
}

double LatticeNorm::convexity_exponent() const {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, WeightedLebesgue>) {
          return r.s;
        } else if constexpr (std::is_same_v<T, PowerOf>) {
          return r.base->convexity_exponent() / r.p;
        } else {
          return r->exponents().p();
        }
      },
      rep_);
}

LatticeNorm LatticeNorm::pth_power(double p) const {
  if (!std::isfinite(p) || p < 1.0) throw InputError("power exponent p must be >= 1");
  if (p > convexity_exponent() * (1.0 + kExponentEps)) {
    throw DomainError("norm is not p-convex with constant 1 for p = " + std::to_string(p));
  }
  if (p == 1.0) return *this;
  if (const auto* l = as_lebesgue()) return lebesgue(mu_, std::max(1.0, l->s / p));
  return LatticeNorm(mu_, PowerOf{std::make_shared<const LatticeNorm>(*this), p});
}

double LatticeNorm::evaluate(std::span<const double> f) const {
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, WeightedLebesgue>) {
          return lebesgue_norm(f, mu_.weights(), r.s);
        } else if constexpr (std::is_same_v<T, PowerOf>) {
          Vector root(f.size());
          for (std::size_t i = 0; i < f.size(); ++i) root[i] = safe_pow(std::abs(f[i]), 1.0 / r.p);
          return safe_pow(r.base->evaluate(root), r.p);
        } else {
          return r->evaluate(f);
        }
      },
      rep_);
}

std::string LatticeNorm::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, WeightedLebesgue>) {
          os << "L^" << r.s << "(mu)";
        } else if constexpr (std::is_same_v<T, PowerOf>) {
          os << "(" << r.base->describe() << ")_" << r.p;
        } else {
          os << "S^" << r->exponents().q() << "_{X_" << r->exponents().p() << "}(xi)";
        }
      },
      rep_);
  os << " on " << mu_.size() << " atoms";
  return os.str();
}

double norm(const LatticeNorm& x, std::span<const double> f) {
  require_dimension(f, x.dimension(), "norm");
  require_finite(f, "norm");
  return x.evaluate(f);
}

double pth_power_norm(const LatticeNorm& x, double p, std::span<const double> f) {
  require_dimension(f, x.dimension(), "pth_power_norm");
  require_finite(f, "pth_power_norm");
  return x.pth_power(p).evaluate(f);
}

double kothe_dual_norm(const LatticeNorm& x, std::span<const double> h) {
  require_dimension(h, x.dimension(), "kothe_dual_norm");
  require_finite(h, "kothe_dual_norm");
  if (const auto* l = x.as_lebesgue()) return lebesgue_dual_norm(h, x.measure().weights(), l->s);
  return kothe_dual_norm_numeric(x, h);
}

double kothe_dual_norm_numeric(const LatticeNorm& x, std::span<const double> h) {
  require_dimension(h, x.dimension(), "kothe_dual_norm");
  require_finite(h, "kothe_dual_norm");
  const std::size_t n = x.dimension();
  const auto mu = x.measure().weights();
  Vector a(n);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::abs(h[i]) * mu[i];
    any = any || a[i] > 0.0;
  }
  if (!any) return 0.0;

  auto ratio = [&](std::span<const double> f) {
    const double den = x.evaluate(f);
    if (den <= 0.0) return 0.0;
    return kernels::dot(a.data(), f.data(), n) / den;
  };

  std::vector<Vector> starts;
  starts.emplace_back(n, 1.0);
  starts.push_back(a);
  const std::size_t vertices = std::min(n, kMaxEnumeratedAtoms);
  for (std::size_t i = 0; i < vertices; ++i) {
    Vector e(n, 0.0);
    e[i] = 1.0;
    starts.push_back(std::move(e));
  }
  double best = 0.0;
  for (auto& s : starts) {
    double value = 0.0;
    maximize_on_simplex(ratio, std::move(s), value);
    best = std::max(best, value);
  }
  return best;
}

DualBall::DualBall(LatticeNorm x, double p) : DualBall(std::move(x), p, false) {}

DualBall DualBall::numeric(LatticeNorm x, double p) { return DualBall(std::move(x), p, true); }

DualBall::DualBall(LatticeNorm x, double p, bool force_numeric)
    : power_(x.pth_power(p)), p_(p), closed_form_(!force_numeric && power_.as_lebesgue() != nullptr) {}

std::optional<double> DualBall::dual_exponent() const {
  if (const auto* l = power_.as_lebesgue()) return conjugate_exponent(l->s);
  return std::nullopt;
}

double DualBall::norm(std::span<const double> h) const {
  return closed_form_ ? kothe_dual_norm(power_, h) : kothe_dual_norm_numeric(power_, h);
}

Vector DualBall::argmax(std::span<const double> c) const {
  const std::size_t n = dimension();
  require_dimension(c, n, "dual argmax");
  const auto mu = power_.measure().weights();
  bool any = false;
  for (double v : c) any = any || v > 0.0;
  if (!any) return positive_unit().h;

  if (closed_form_) {
    const double sigma = power_.as_lebesgue()->s;
    if (sigma == 1.0) return Vector(n, 1.0);
    // Hölder equality case: h = c^{sigma-1} / ||c||_sigma^{sigma-1}.
    const double scale = lebesgue_norm(c, mu, sigma);
    Vector h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = safe_pow(std::max(c[i], 0.0) / scale, sigma - 1.0);
    return h;
  }

  // Norming functional of ||.||_{X_p} at c, i.e. its gradient divided by mu.
  Vector base(c.begin(), c.end());
  for (double& v : base) v = std::max(v, 0.0);
  Vector h(n, 0.0);
  Vector probe = base;
  for (std::size_t i = 0; i < n; ++i) {
    const double step = 1e-6 * std::max(1.0, std::abs(base[i]));
    probe[i] = base[i] + step;
    const double up = power_.evaluate(probe);
    if (base[i] > step) {
      probe[i] = base[i] - step;
      h[i] = (up - power_.evaluate(probe)) / (2.0 * step);
    } else {
      probe[i] = base[i];
      h[i] = (up - power_.evaluate(probe)) / step;
    }
    probe[i] = base[i];
    h[i] = std::max(h[i], 0.0) / mu[i];
  }
  const double nh = norm(h);
  if (nh <= 0.0) return positive_unit().h;
  for (double& v : h) v /= nh;
  return h;
}

DualVector DualBall::certify(Vector h) const {
  const double n = norm(h);
  return DualVector{std::move(h), n};
}

std::vector<DualVector> DualBall::extreme_candidates() const {
  const std::size_t n = dimension();
  const auto t = dual_exponent();
  const bool cube = closed_form_ && t && *t == kInfinity;
  std::vector<DualVector> out;

  auto add_indicator = [&](const Vector& chi) {
    if (cube) {
      out.push_back(DualVector{chi, norm(chi)});
      return;
    }
    const double nc = norm(chi);
    if (nc <= 0.0) return;
    Vector h = chi;
    for (double& v : h) v /= nc;
    out.push_back(certify(std::move(h)));
  };

  if (n <= kMaxEnumeratedAtoms) {
    const std::size_t patterns = std::size_t{1} << n;
    for (std::size_t mask = patterns; mask-- > 0;) {
      if (mask == 0 && !cube) break;
      Vector chi(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) chi[i] = (mask >> i) & 1U ? 1.0 : 0.0;
      add_indicator(chi);
    }
  } else {
    add_indicator(Vector(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
      Vector chi(n, 0.0);
      chi[i] = 1.0;
      add_indicator(chi);
    }
  }
  return out;
}

DualVector DualBall::random_point(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Vector h(dimension());
  for (double& v : h) v = dist(rng) + 1e-12;
  const double nh = norm(h);
  for (double& v : h) v /= nh;
  return certify(std::move(h));
}

DualVector DualBall::positive_unit() const {
  Vector h(dimension(), 1.0);
  const double nh = norm(h);
  for (double& v : h) v /= nh;
  return certify(std::move(h));
}

DualSampling parse_dual_sampling(const std::string& name) {
  if (name == "extreme") return DualSampling::extreme;
  if (name == "random") return DualSampling::random;
  throw InputError("unsupported dual-ball sampling strategy '" + name + "'");
}

std::vector<DualVector> sample_positive_dual_ball(const LatticeNorm& x, double p, DualSampling strategy,
                                                  std::size_t count, std::uint64_t seed) {
  const DualBall ball(x, p);
  std::vector<DualVector> out;
  if (count == 0) return out;
  if (strategy == DualSampling::extreme) {
    out = ball.extreme_candidates();
    if (out.size() > count) out.resize(count);
  }
  auto rng = make_rng(seed, 0);
  while (out.size() < count) out.push_back(ball.random_point(rng));
  return out;
}

std::vector<DualVector> default_dual_grid(const LatticeNorm& x, double p, std::size_t random_count,
                                          std::uint64_t seed) {
  const DualBall ball(x, p);
  auto out = ball.extreme_candidates();
  auto rng = make_rng(seed, 0);
  for (std::size_t k = 0; k < random_count; ++k) out.push_back(ball.random_point(rng));
  return out;
}

std::string to_string(ConstantKind kind) {
  switch (kind) {
    case ConstantKind::operator_norm: return "operator_norm";
    case ConstantKind::q_concavity: return "M_q";
    case ConstantKind::pq_concavity: return "M_pq";
    case ConstantKind::q_summing: return "pi_q";
    case ConstantKind::p_convexity: return "M^p";
  }
  return "unknown";
}

double lattice_power_sum_norm(const LatticeNorm& x, const Family& family, double e) {
  const std::size_t n = x.dimension();
  Vector u(n, 0.0);
  for (const auto& f : family) {
    require_dimension(f, n, "family member");
    for (std::size_t w = 0; w < n; ++w) u[w] += safe_pow(std::abs(f[w]), e);
  }
  for (double& v : u) v = safe_pow(v, 1.0 / e);
  return x.evaluate(u);
}

double p_convexity_ratio(const LatticeNorm& x, double p, const Family& family) {
  const double top = lattice_power_sum_norm(x, family, p);
  double bottom = 0.0;
  for (const auto& f : family) bottom += safe_pow(x.evaluate(f), p);
  bottom = safe_pow(bottom, 1.0 / p);
  if (bottom <= 0.0) return 0.0;
  return top / bottom;
}

ConstantEstimate p_convexity_estimate(const LatticeNorm& x, double p, const SearchBudget& budget,
                                      std::uint64_t seed) {
  if (!std::isfinite(p) || p < 1.0) throw InputError("p must be >= 1");
  auto ratio = [&](const Family& family) { return p_convexity_ratio(x, p, family); };
  auto found = search_families(ratio, x.dimension(), budget, seed, true);
  return ConstantEstimate{ConstantKind::p_convexity, found.value, std::move(found.family), found.evaluations};
}

}  // namespace latfact
