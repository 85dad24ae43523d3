#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace shiftlab {

// Reduced fraction with 64-bit parts. Arithmetic returns nullopt on overflow
// so callers can drop to floating point.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static std::optional<Rational> make(__int128 n, __int128 d);
  static Rational integer(std::int64_t n) { return {n, 1}; }
  // Exact value of a finite double when it fits, e.g. 0.5 -> 1/2.
  static std::optional<Rational> from_double(double x);
  static std::optional<Rational> parse(const std::string& s);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_zero() const { return num == 0; }
  Rational abs() const { return {num < 0 ? -num : num, den}; }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

std::optional<Rational> mul(const Rational& a, const Rational& b);
std::optional<Rational> div(const Rational& a, const Rational& b);
std::optional<Rational> add(const Rational& a, const Rational& b);
std::optional<Rational> pow(const Rational& a, int e);

inline std::optional<Rational> mul(const std::optional<Rational>& a,
                                   const std::optional<Rational>& b) {
  if (!a || !b) return std::nullopt;
  return mul(*a, *b);
}
inline std::optional<Rational> div(const std::optional<Rational>& a,
                                   const std::optional<Rational>& b) {
  if (!a || !b) return std::nullopt;
  return div(*a, *b);
}

}  // namespace shiftlab
