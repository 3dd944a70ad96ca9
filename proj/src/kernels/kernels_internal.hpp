#pragma once

#include <cstddef>

#include "softcap/kernels.hpp"

namespace softcap::kernels {

namespace scalar {
double l1_norm(const double* a, std::size_t n);
double l1_distance(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
DotNorms dot_norms(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void subtract(const double* a, const double* b, double* out, std::size_t n);
}  // namespace scalar

#if defined(SOFTCAP_HAVE_AVX2)
namespace avx2 {
double l1_norm(const double* a, std::size_t n);
double l1_distance(const double* a, const double* b, std::size_t n);
double sum_squares(const double* a, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
DotNorms dot_norms(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void subtract(const double* a, const double* b, double* out, std::size_t n);
}  // namespace avx2
#endif

}  // namespace softcap::kernels
