#pragma once
// Derivative-free local search and seeded multi-restart helpers shared by the
// estimators. Restart k depends only on (seed, k), so results are identical for
// any thread count and nondecreasing when restarts or sweeps grow.

#include <cstdint>
#include <functional>
#include <random>

#include "latfact/common.hpp"

namespace latfact {

struct SearchBudget {
  int restarts = 24;
  int sweeps = 60;
  int max_family = 8;
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

// Threads used for independent restarts (LATFACT_THREADS, default hardware concurrency).
unsigned worker_count();

// Runs body(k) for k in [0, count); each index is evaluated exactly once.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Maximizes a function of a nonnegative vector that only depends on its
// direction, searching the probability simplex by pairwise mass transfers
// with a halving step. Returns the best point; `value` receives its objective.
Vector maximize_on_simplex(const std::function<double(std::span<const double>)>& objective, Vector start,
                           double& value, double min_step = 1e-13);

struct FamilySearchResult {
  double value = 0.0;
  Family family;
  long evaluations = 0;
};

// Multi-restart coordinate ascent over finite families of vectors in R^n.
// Restart 0 starts from the unit atoms, later restarts from seeded random
// families with sizes cycling through 1..max_family. Ties keep the earliest.
FamilySearchResult search_families(const std::function<double(const Family&)>& ratio, std::size_t n,
                                   const SearchBudget& budget, std::uint64_t seed, bool nonnegative);

}  // namespace latfact
