#pragma once

#include <cstddef>
#include <cstdint>

namespace cswitch {

/// Exact rational in [0, 1), used for the fractional-exposure threshold so
/// that "count / size >= 1 - delta" is decided in integers.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Nearest rational with denominator <= 10^6 (continued fractions).
  /// Throws ValidationError outside [0, 1).
  static Fraction from_double(double value);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  bool operator==(const Fraction&) const = default;
};

/// count / size >= 1 - delta, evaluated exactly.
inline bool meets_fraction(std::size_t count, std::size_t size, Fraction delta) {
  return static_cast<std::int64_t>(count) * delta.den >=
         (delta.den - delta.num) * static_cast<std::int64_t>(size);
}

}  // namespace cswitch
