#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace latfact {

using Vector = std::vector<double>;
using Family = std::vector<Vector>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Malformed input: wrong dimensions, non-finite entries, parameters out of range.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A precondition of a mathematical construction does not hold
// (e.g. an exponent pair for which the norm is not 1-constant p-convex).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

void require_dimension(std::span<const double> f, std::size_t n, const char* what);
void require_finite(std::span<const double> f, const char* what);

// x^e with the convention 0^e = 0 for e > 0 and 0^0 = 1, via exp(e log x).
double safe_pow(double x, double e);

// Row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

}  // namespace latfact
