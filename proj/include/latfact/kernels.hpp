#pragma once
// Dense double-precision inner loops used by the norm evaluators, the
// domination solver and the tableau simplex. Every kernel has a scalar
// reference implementation; vector variants are selected once at startup
// from the host CPU features (override with LATFACT_SIMD=scalar|avx2|neon).

#include <cstddef>
#include <string_view>

namespace latfact::kernels {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i] * b[i] * c[i]
  double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[k] = sum_j m[k * cols + j] * v[j], row-major m
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols, const double* v, double* out);
};

const KernelTable& scalar_table();
// Null when the variant was not compiled in or the host lacks the feature.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// The table selected for this process.
const KernelTable& active();
std::string_view isa_name(Isa isa);

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  return active().dot3(a, b, c, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void gemv(const double* m, std::size_t rows, std::size_t cols, const double* v, double* out) {
  active().gemv(m, rows, cols, v, out);
}

namespace detail {
const KernelTable* avx2_table_impl();
const KernelTable* neon_table_impl();
}  // namespace detail

}  // namespace latfact::kernels
