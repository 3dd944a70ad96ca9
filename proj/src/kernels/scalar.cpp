#include <cmath>

#include "kernels_internal.hpp"

namespace softcap::kernels::scalar {

double l1_norm(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i]);
  return acc;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

double sum_squares(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

DotNorms dot_norms(const double* a, const double* b, std::size_t n) {
  DotNorms r;
  for (std::size_t i = 0; i < n; ++i) {
    r.dot += a[i] * b[i];
    r.sq_a += a[i] * a[i];
    r.sq_b += b[i] * b[i];
  }
  return r;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void subtract(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

}  // namespace softcap::kernels::scalar
