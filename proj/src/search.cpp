#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "latfact/search.hpp"

namespace latfact {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(seed, stream));
}

unsigned worker_count() {
  if (const char* env = std::getenv("LATFACT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < count; k += workers) body(k);
    });
  }
  for (auto& t : pool) t.join();
}

Vector maximize_on_simplex(const std::function<double(std::span<const double>)>& objective, Vector start,
                           double& value, double min_step) {
  const std::size_t n = start.size();
  double total = 0.0;
  for (double& v : start) {
    v = std::max(v, 0.0);
    total += v;
  }
  if (total <= 0.0) std::fill(start.begin(), start.end(), 1.0 / static_cast<double>(n));
  else for (double& v : start) v /= total;

  Vector x = std::move(start);
  value = objective(x);
  if (n < 2) return x;
  Vector trial(n);
  for (double step = 0.25; step >= min_step; step *= 0.5) {
    bool improved = true;
    int rounds = 0;
    while (improved && rounds++ < 200) {
      improved = false;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j || x[j] <= 0.0) continue;
          const double move = std::min(step, x[j]);
          trial = x;
          trial[i] += move;
          trial[j] -= move;
          const double v = objective(trial);
          if (v > value) {
            value = v;
            x.swap(trial);
            improved = true;
          }
        }
      }
    }
  }
  return x;
}

namespace {

constexpr double kMinFamilyStep = 1e-9;

FamilySearchResult run_restart(const std::function<double(const Family&)>& ratio, std::size_t n,
                               const SearchBudget& budget, std::uint64_t seed, bool nonnegative,
                               std::size_t restart) {
  Family family;
  const std::size_t cap = static_cast<std::size_t>(std::max(1, budget.max_family));
  if (restart == 0) {
    const std::size_t m = std::min(n, cap);
    for (std::size_t i = 0; i < m; ++i) {
      Vector e(n, 0.0);
      e[i] = 1.0;
      family.push_back(std::move(e));
    }
  } else {
    auto rng = make_rng(seed, restart);
    std::uniform_real_distribution<double> dist(nonnegative ? 0.0 : -1.0, 1.0);
    const std::size_t m = 1 + (restart - 1) % cap;
    family.assign(m, Vector(n));
    for (auto& f : family)
      for (double& v : f) v = dist(rng);
  }

  FamilySearchResult result;
  double best = ratio(family);
  if (!std::isfinite(best)) best = 0.0;
  result.evaluations = 1;
  double step = 0.5;
  for (int sweep = 0; sweep < budget.sweeps; ++sweep) {
    bool improved = false;
    for (auto& f : family) {
      for (std::size_t w = 0; w < n; ++w) {
        const double saved = f[w];
        for (double dir : {1.0, -1.0}) {
          double cand = saved + dir * step;
          if (nonnegative && cand < 0.0) cand = 0.0;
          if (cand == saved) continue;
          f[w] = cand;
          const double v = ratio(family);
          ++result.evaluations;
          if (std::isfinite(v) && v > best) {
            best = v;
            improved = true;
            break;
          }
          f[w] = saved;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (step < kMinFamilyStep) break;
  }
  result.value = best;
  result.family = std::move(family);
  return result;
}

}  // namespace

FamilySearchResult search_families(const std::function<double(const Family&)>& ratio, std::size_t n,
                                   const SearchBudget& budget, std::uint64_t seed, bool nonnegative) {
  const std::size_t restarts = static_cast<std::size_t>(std::max(0, budget.restarts));
  std::vector<FamilySearchResult> results(restarts);
  parallel_for(restarts, [&](std::size_t k) { results[k] = run_restart(ratio, n, budget, seed, nonnegative, k); });

  FamilySearchResult best;
  bool have = false;
  long evaluations = 0;
  for (auto& r : results) {
    evaluations += r.evaluations;
    if (!have || r.value > best.value) {
      best = std::move(r);
      have = true;
    }
  }
  best.evaluations = evaluations;
  return best;
}

}  // namespace latfact
