#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

namespace shiftlab {

// Unevaluated sum hi + lo. Sums of a few hundred thousand logarithms stay
// exact, so equal multisets of weights give bitwise equal partial sums.
struct DD {
  double hi = 0.0;
  double lo = 0.0;

  double value() const { return hi + lo; }
  friend bool operator==(const DD&, const DD&) = default;
};

namespace dd_detail {
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}
inline void fast_two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  e = b - (s - a);
}
}  // namespace dd_detail

inline DD operator+(const DD& a, const DD& b) {
  double s, e, t, f;
  dd_detail::two_sum(a.hi, b.hi, s, e);
  dd_detail::two_sum(a.lo, b.lo, t, f);
  e += t;
  dd_detail::fast_two_sum(s, e, s, e);
  e += f;
  dd_detail::fast_two_sum(s, e, s, e);
  return {s, e};
}
inline DD operator-(const DD& a) { return {-a.hi, -a.lo}; }
inline DD operator-(const DD& a, const DD& b) { return a + (-b); }
inline DD operator+(const DD& a, double b) { return a + DD{b, 0.0}; }

// exp(hi + lo) with the low part folded in by one fused multiply-add.
inline double exp_dd(const DD& x) {
  double m = std::exp(x.hi);
  return std::fma(m, x.lo, m);
}

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Reduce to (-pi, pi]. Real phases stay exactly in {0, pi}.
inline double wrap_phase(double x) {
  while (x > kPi) x -= 2.0 * kPi;
  while (x <= -kPi) x += 2.0 * kPi;
  return x;
}

// One coordinate of a vector kept as log-modulus and phase.
struct LogCoord {
  DD log_abs{kNegInf, 0.0};
  double phase = 0.0;

  bool is_zero() const { return log_abs.hi == kNegInf; }
  std::complex<double> value() const {
    if (is_zero()) return {0.0, 0.0};
    double m = exp_dd(log_abs);
    if (phase == 0.0) return {m, 0.0};
    if (phase == kPi) return {-m, 0.0};
    return std::polar(m, phase);
  }
  static LogCoord from_value(std::complex<double> z) {
    LogCoord c;
    if (z == std::complex<double>(0.0, 0.0)) return c;
    c.log_abs = {std::log(std::abs(z)), 0.0};
    if (z.imag() == 0.0)
      c.phase = z.real() < 0 ? kPi : 0.0;
    else
      c.phase = wrap_phase(std::arg(z));
    return c;
  }
  friend bool operator==(const LogCoord&, const LogCoord&) = default;
};

using LogVector = std::vector<LogCoord>;

inline std::vector<std::complex<double>> values(const LogVector& x) {
  std::vector<std::complex<double>> out;
  out.reserve(x.size());
  for (const auto& c : x) out.push_back(c.value());
  return out;
}

inline LogVector to_log_vector(const std::vector<std::complex<double>>& x) {
  LogVector out;
  out.reserve(x.size());
  for (auto z : x) out.push_back(LogCoord::from_value(z));
  return out;
}

// log of the lp norm, -inf for the zero vector.
inline double log_norm(const LogVector& x, double p) {
  double m = kNegInf;
  for (const auto& c : x)
    if (!c.is_zero()) m = std::max(m, c.log_abs.value());
  if (m == kNegInf) return m;
  double s = 0.0;
  for (const auto& c : x)
    if (!c.is_zero()) s += std::exp(p * (c.log_abs.value() - m));
  return m + std::log(s) / p;
}

}  // namespace shiftlab
