#include <atomic>
#include <stdexcept>
#include <string>

#include "cswitch/simd/kernels.hpp"

namespace cswitch::simd {

namespace {

Isa detect() {
#if defined(CSWITCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
  return detect() == Isa::avx2;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("instruction set not available: " + std::string(isa_name(isa)));
  }
  current().store(isa, std::memory_order_relaxed);
}

void reset_isa() { current().store(detect(), std::memory_order_relaxed); }

#if defined(CSWITCH_HAVE_AVX2)
#define CSWITCH_DISPATCH(fn, ...)                                      \
  (active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define CSWITCH_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> a, std::span<const double> b) {
  return CSWITCH_DISPATCH(dot, a, b);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  return CSWITCH_DISPATCH(l1_distance, a, b);
}

void vec_mat(std::span<const double> x, std::span<const double> m, std::span<double> out) {
  CSWITCH_DISPATCH(vec_mat, x, m, out);
}

void mat_vec(std::span<const double> m, std::span<const double> x, std::span<double> out) {
  CSWITCH_DISPATCH(mat_vec, m, x, out);
}

#undef CSWITCH_DISPATCH

}  // namespace cswitch::simd
