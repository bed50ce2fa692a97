#include "latfact/kernels.hpp"

namespace latfact::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3_scalar(const double* a, const double* b, const double* c, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* m, std::size_t rows, std::size_t cols, const double* v, double* out) {
  for (std::size_t k = 0; k < rows; ++k) out[k] = dot_scalar(m + k * cols, v, cols);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, dot_scalar, dot3_scalar, axpy_scalar, gemv_scalar};
  return table;
}

}  // namespace latfact::kernels
