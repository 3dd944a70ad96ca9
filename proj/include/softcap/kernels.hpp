#pragma once

// Reduction and update kernels used by the observer and the cache engine.
//
// Every kernel has a scalar reference implementation. On x86-64 an AVX2/FMA
// variant is also compiled (in its own translation unit) and selected at
// runtime when the CPU supports it. Setting SOFTCAP_KERNELS=scalar in the
// environment pins the scalar path. Within one ISA the summation order is
// fixed, so results are bit-reproducible run to run.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace softcap::kernels {

enum class Isa { scalar, avx2 };

struct DotNorms {
  double dot = 0.0;
  double sq_a = 0.0;  // sum of squares of a
  double sq_b = 0.0;  // sum of squares of b
};

/// Raw entry points for one ISA. All lengths are element counts.
struct KernelTable {
  double (*l1_norm)(const double* a, std::size_t n);
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  DotNorms (*dot_norms)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*subtract)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_table();
bool isa_available(Isa isa);
/// Throws std::invalid_argument if the ISA is not available on this build/CPU.
const KernelTable& table_for(Isa isa);

Isa active_isa();
/// Overrides the runtime selection (tests and benchmarks). Throws if unavailable.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);
std::vector<Isa> available_isas();

// Span front-ends over the active table. Binary kernels require equal lengths.
double l1_norm(std::span<const double> a);
double l1_distance(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
DotNorms dot_norms(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void subtract(std::span<const double> a, std::span<const double> b, std::span<double> out);

}  // namespace softcap::kernels
