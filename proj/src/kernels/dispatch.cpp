#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_internal.hpp"

namespace softcap::kernels {

namespace {

constexpr KernelTable kScalar{
    scalar::l1_norm,          scalar::l1_distance, scalar::sum_squares, scalar::squared_distance,
    scalar::dot_norms,        scalar::axpy,        scalar::subtract,
};

#if defined(SOFTCAP_HAVE_AVX2)
constexpr KernelTable kAvx2{
    avx2::l1_norm,   avx2::l1_distance, avx2::sum_squares, avx2::squared_distance,
    avx2::dot_norms, avx2::axpy,        avx2::subtract,
};
#endif

bool cpu_has_avx2() {
#if defined(SOFTCAP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("SOFTCAP_KERNELS"); env != nullptr && std::string(env) == "scalar") {
    return Isa::scalar;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&table_for(detect())};
  return slot;
}

std::atomic<Isa>& active_isa_slot() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("kernel operands differ in length: " + std::to_string(a) + " vs " +
                                std::to_string(b));
  }
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel ISA not available: " + std::string(isa_name(isa)));
  }
#if defined(SOFTCAP_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

Isa active_isa() { return active_isa_slot().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) {
  const KernelTable& t = table_for(isa);
  active_slot().store(&t, std::memory_order_release);
  active_isa_slot().store(isa, std::memory_order_release);
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::scalar};
  if (isa_available(Isa::avx2)) out.push_back(Isa::avx2);
  return out;
}

namespace {
const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }
}  // namespace

double l1_norm(std::span<const double> a) { return active().l1_norm(a.data(), a.size()); }

double l1_distance(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size());
  return active().l1_distance(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) { return active().sum_squares(a.data(), a.size()); }

double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

DotNorms dot_norms(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size());
  return active().dot_norms(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_length(x.size(), y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

void subtract(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  require_same_length(a.size(), b.size());
  require_same_length(a.size(), out.size());
  active().subtract(a.data(), b.data(), out.data(), a.size());
}

}  // namespace softcap::kernels
