#pragma once
// Dense double-precision kernels used by distribution evolution, total
// variation and exact mean computations.
//
// Each kernel has a scalar reference implementation and an AVX2 variant.
// The public entry points dispatch at runtime to the widest instruction set
// supported by the host; tests compare every variant against the scalar
// reference.

#include <cstddef>
#include <span>
#include <string_view>

namespace cswitch::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// True if the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);

/// The variant currently used by the dispatching entry points.
Isa active_isa();

/// Overrides dispatch. Throws std::invalid_argument if `isa` is unavailable.
/// Intended for tests and benchmarks; not thread-safe against concurrent
/// kernel calls.
void force_isa(Isa isa);

/// Restores the automatically detected variant.
void reset_isa();

double dot(std::span<const double> a, std::span<const double> b);

/// Sum of |a[k] - b[k]|.
double l1_distance(std::span<const double> a, std::span<const double> b);

/// out = x * M, with M stored row-major as x.size() rows of out.size()
/// columns. `out` must not alias `x` or `m`.
void vec_mat(std::span<const double> x, std::span<const double> m, std::span<double> out);

/// out = M * x (matrix applied to a column vector), M row-major with
/// out.size() rows of x.size() columns.
void mat_vec(std::span<const double> m, std::span<const double> x, std::span<double> out);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b);
double l1_distance(std::span<const double> a, std::span<const double> b);
void vec_mat(std::span<const double> x, std::span<const double> m, std::span<double> out);
void mat_vec(std::span<const double> m, std::span<const double> x, std::span<double> out);
}  // namespace scalar

namespace avx2 {
// Only callable when isa_available(Isa::avx2).
double dot(std::span<const double> a, std::span<const double> b);
double l1_distance(std::span<const double> a, std::span<const double> b);
void vec_mat(std::span<const double> x, std::span<const double> m, std::span<double> out);
void mat_vec(std::span<const double> m, std::span<const double> x, std::span<double> out);
}  // namespace avx2

}  // namespace cswitch::simd
