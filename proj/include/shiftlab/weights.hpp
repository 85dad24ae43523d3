#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shiftlab/dd.hpp"
#include "shiftlab/rational.hpp"
#include "shiftlab/series.hpp"
#include "shiftlab/verdict.hpp"

namespace shiftlab {

enum class Field { Real, Complex };
inline int field_dim(Field f) { return f == Field::Real ? 1 : 2; }

struct Scalar {
  std::complex<double> value{1.0, 0.0};
  std::optional<Rational> exact;  // only for real rationals

  static Scalar real(double x);
  static Scalar rational(Rational r);
  static Scalar complex(std::complex<double> z);

  bool is_zero() const { return value == std::complex<double>(0.0, 0.0); }
  bool is_real() const { return value.imag() == 0.0; }
  double abs() const { return std::abs(value); }
  double log_abs() const;
  double phase() const;  // exactly 0 or pi for reals
  std::optional<Rational> exact_abs() const;
};

Scalar operator*(const Scalar& a, const Scalar& b);
Scalar operator/(const Scalar& a, const Scalar& b);

// Nonnegative sequence with eps_0 = 0.
struct EpsilonGenerator {
  enum class Form { Power, Geometric, List };
  Form form = Form::Power;
  double c = 1.0;
  double s = 1.0;  // Power: c / n^s
  double r = 0.5;  // Geometric: c * r^n
  std::vector<double> list;  // list[k] = eps_{k+1}

  double at(long n) const;
  std::optional<Rational> exact_at(long n) const;
  bool vanishes() const;  // eps_n -> 0
  bool constant_tail() const;  // eps_n constant for n >= 1
  bool summable() const;
  bool square_summable() const;
};

// Exceptional positions of a sparse weight sequence.
struct ExceptionSchedule {
  enum class Kind { Formula, List };
  enum class Law { Reciprocal, Constant };
  Kind kind = Kind::Formula;
  // Formula: positions scale * ratio^k + offset for k >= k0, value c/k or c.
  long scale = 5;
  long ratio = 4;
  long k0 = 1;
  std::vector<long> offsets;
  Law law = Law::Reciprocal;
  Scalar c = Scalar::real(1.0);
  // List: explicit (position, value) pairs, positions strictly increasing.
  std::vector<std::pair<long, Scalar>> list;

  std::optional<Scalar> lookup(long n) const;
  Scalar group_value(long k) const;
  // Start of group k, or -1 if beyond the long range.
  long group_base(long k) const;
  void validate() const;
};

class WeightSpec {
 public:
  struct Constant {
    Scalar c;
  };
  struct Scaled {
    Scalar a;
    std::shared_ptr<const WeightSpec> base;
  };
  struct Prefix {
    std::vector<Scalar> prefix;
    Scalar tail;
  };
  struct Sparse {
    Scalar base;
    ExceptionSchedule exceptions;
  };
  struct Ratio {
    Scalar base;
    EpsilonGenerator eps;
  };
  using Kind = std::variant<Constant, Scaled, Prefix, Sparse, Ratio>;

  static WeightSpec constant(Scalar c, Field f = Field::Real);
  static WeightSpec scaled(Scalar a, const WeightSpec& base);
  static WeightSpec prefix(std::vector<Scalar> prefix, Scalar tail, Field f = Field::Real);
  static WeightSpec sparse(Scalar base, ExceptionSchedule ex, Field f = Field::Real);
  static WeightSpec ratio(Scalar base, EpsilonGenerator eps, Field f = Field::Real);

  const Kind& kind() const { return kind_; }
  Field field() const { return field_; }
  WeightSpec with_field(Field f) const;

  // w_n for n >= 1.
  Scalar at(long n) const;
  bool all_rational() const;

 private:
  WeightSpec(Kind k, Field f);
  Kind kind_;
  Field field_ = Field::Real;
};

Scalar eval_weight(const WeightSpec& spec, long n);
bool structurally_equal(const WeightSpec& a, const WeightSpec& b);

// Cumulative log-moduli L_n and phases of w_1...w_n for n = 0..N.
class LogProductSeries {
 public:
  LogProductSeries() = default;
  static LogProductSeries compute(const WeightSpec& spec, long horizon);
  LogProductSeries extended(long horizon) const;

  long horizon() const { return static_cast<long>(logs_.size()) - 1; }
  const WeightSpec& spec() const { return *spec_; }
  const DD& log_dd(long n) const { return logs_.at(n); }
  double log(long n) const { return logs_.at(n).value(); }
  double phase(long n) const { return phases_.empty() ? 0.0 : phases_.at(n); }
  bool has_phases() const { return !phases_.empty(); }
  // L_n - L_m without cancellation loss.
  double log_diff(long n, long m) const { return (logs_.at(n) - logs_.at(m)).value(); }

 private:
  void grow(long horizon);
  std::shared_ptr<const WeightSpec> spec_;
  std::vector<DD> logs_;
  std::vector<double> phases_;
};

LogProductSeries log_products(const WeightSpec& spec, long N);

// Asymptotic shape of L_n read off the spec.
struct TailForm {
  enum class Kind {
    Affine,     // L_n = n * rate + const for n >= from
    Vanishing,  // L_n = n * rate + log(1 + eps_n), eps_n -> 0
    Sparse,     // L_n = n * rate + sum over exceptions <= n of log|value / base|
    Unknown
  };
  Kind kind = Kind::Unknown;
  double rate = 0.0;
  std::optional<Rational> modulus;  // exp(rate) when exactly known
  long from = 0;
  std::optional<EpsilonGenerator> eps;
  std::optional<ExceptionSchedule> schedule;
  double base_abs = 1.0;  // |base| of the sparse rule, before scaling
};

TailForm tail_form(const WeightSpec& spec);

// Certified lower bound on |w_n| from the spec, 0 when none exists.
double lower_bound_modulus(const WeightSpec& spec);
double upper_bound_modulus(const WeightSpec& spec);

struct WeightsConfig {
  long horizon = 100000;
  double divergence_log = 700.0;  // L_n above this counts as +infinity
  SeriesConfig series;
};

struct SummabilityVerdict {
  SeriesStatus status = SeriesStatus::Undecided;
  double partial_sum = 0.0;
  long horizon = 0;
  std::string tail_rule = "none";
  double tail_bound = -1.0;
};

SummabilityVerdict summability(const WeightSpec& spec, double p, long horizon,
                               const WeightsConfig& cfg = {});
SummabilityVerdict summability(const LogProductSeries& series, double p,
                               const WeightsConfig& cfg = {});

struct Classification {
  Verdict hypercyclic;
  Verdict mixing;
  Verdict chaotic_fhc;
  Verdict has_nontrivial_invariant_measure;
};

Classification classify(const WeightSpec& spec, double p, long horizon,
                        const WeightsConfig& cfg = {});

struct FixedPoint {
  LogVector x;
  double tail_bound = 0.0;  // bound on ||x - x_N||_p
};

FixedPoint fixed_point(const WeightSpec& spec, double p, long N, const WeightsConfig& cfg = {});

Verdict summability_certificate_check(const LogVector& x, const std::vector<long>& n_set,
                                      const WeightSpec& spec, double p,
                                      std::pair<double, double> bounds,
                                      const WeightsConfig& cfg = {});

// (B_w^n x)_j = w_{j+1}...w_{j+n} x_{j+n}. Needs series.horizon() >= x.size() - 1.
LogVector apply_shift_power(const LogProductSeries& series, const LogVector& x, long n);

}  // namespace shiftlab
