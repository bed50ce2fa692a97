#include <cmath>
#include <string>

#include "latfact/common.hpp"

namespace latfact {

void require_dimension(std::span<const double> f, std::size_t n, const char* what) {
  if (f.size() != n) {
    throw InputError(std::string(what) + ": expected length " + std::to_string(n) + ", got " +
                     std::to_string(f.size()));
  }
}

void require_finite(std::span<const double> f, const char* what) {
  for (double v : f) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite entry");
  }
}

double safe_pow(double x, double e) {
  if (x <= 0.0) return e == 0.0 ? 1.0 : 0.0;
  if (e == 1.0) return x;
  return std::exp(e * std::log(x));
}

}  // namespace latfact
