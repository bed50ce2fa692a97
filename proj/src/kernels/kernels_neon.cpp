#include "latfact/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

namespace latfact::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3_neon(const double* a, const double* b, const double* c, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), vld1q_f64(c + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_neon(const double* m, std::size_t rows, std::size_t cols, const double* v, double* out) {
  for (std::size_t k = 0; k < rows; ++k) out[k] = dot_neon(m + k * cols, v, cols);
}

}  // namespace

namespace detail {
const KernelTable* neon_table_impl() {
  static const KernelTable table{Isa::neon, dot_neon, dot3_neon, axpy_neon, gemv_neon};
  return &table;
}
}  // namespace detail

}  // namespace latfact::kernels

#else

namespace latfact::kernels::detail {
const KernelTable* neon_table_impl() { return nullptr; }
}  // namespace latfact::kernels::detail

#endif
