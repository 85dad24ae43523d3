#include "shiftlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shiftlab/errors.hpp"
#include "shiftlab/json_io.hpp"

namespace shiftlab {

// ---------------------------------------------------------------- Scalar

Scalar Scalar::real(double x) {
  Scalar s;
  s.value = {x, 0.0};
  s.exact = Rational::from_double(x);
  return s;
}

Scalar Scalar::rational(Rational r) {
  Scalar s;
  s.value = {r.to_double(), 0.0};
  s.exact = r;
  return s;
}

Scalar Scalar::complex(std::complex<double> z) {
  if (z.imag() == 0.0) return real(z.real());
  Scalar s;
  s.value = z;
  return s;
}

double Scalar::log_abs() const { return std::log(std::abs(value)); }

double Scalar::phase() const {
  if (value.imag() == 0.0) return value.real() < 0 ? kPi : 0.0;
  return wrap_phase(std::arg(value));
}

std::optional<Rational> Scalar::exact_abs() const {
  if (!exact) return std::nullopt;
  return exact->abs();
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) {
    if (auto r = mul(*a.exact, *b.exact)) return Scalar::rational(*r);
  }
  return Scalar::complex(a.value * b.value);
}

Scalar operator/(const Scalar& a, const Scalar& b) {
  if (a.exact && b.exact) {
    if (auto r = div(*a.exact, *b.exact)) return Scalar::rational(*r);
  }
  return Scalar::complex(a.value / b.value);
}

// ------------------------------------------------------- EpsilonGenerator

double EpsilonGenerator::at(long n) const {
  if (n <= 0) return 0.0;
  switch (form) {
    case Form::Power: return c / std::pow(static_cast<double>(n), s);
    case Form::Geometric: return c * std::pow(r, static_cast<double>(n));
    case Form::List:
      if (n - 1 >= static_cast<long>(list.size()))
        throw HorizonExceeded("epsilon list has " + std::to_string(list.size()) + " entries");
      return list[n - 1];
  }
  return 0.0;
}

std::optional<Rational> EpsilonGenerator::exact_at(long n) const {
  if (n <= 0) return Rational{0, 1};
  auto cr = Rational::from_double(c);
  if (!cr) return std::nullopt;
  switch (form) {
    case Form::Power: {
      if (s != std::floor(s) || s < 0 || s > 8) return std::nullopt;
      auto np = pow(Rational::integer(n), static_cast<int>(s));
      if (!np) return std::nullopt;
      return div(*cr, *np);
    }
    case Form::Geometric: {
      auto rr = Rational::from_double(r);
      if (!rr || n > 62) return std::nullopt;
      auto rp = pow(*rr, static_cast<int>(n));
      if (!rp) return std::nullopt;
      return mul(*cr, *rp);
    }
    case Form::List:
      if (n - 1 >= static_cast<long>(list.size()))
        throw HorizonExceeded("epsilon list has " + std::to_string(list.size()) + " entries");
      return Rational::from_double(list[n - 1]);
  }
  return std::nullopt;
}

bool EpsilonGenerator::vanishes() const {
  if (c == 0.0) return true;
  switch (form) {
    case Form::Power: return s > 0;
    case Form::Geometric: return r >= 0 && r < 1;
    case Form::List: return false;
  }
  return false;
}

bool EpsilonGenerator::constant_tail() const {
  if (c == 0.0) return true;
  if (form == Form::Power) return s == 0;
  if (form == Form::Geometric) return r == 1;
  return false;
}

bool EpsilonGenerator::summable() const {
  if (c == 0.0) return true;
  if (form == Form::Power) return s > 1;
  if (form == Form::Geometric) return r >= 0 && r < 1;
  return false;
}

bool EpsilonGenerator::square_summable() const {
  if (c == 0.0) return true;
  if (form == Form::Power) return s > 0.5;
  if (form == Form::Geometric) return r >= 0 && r < 1;
  return false;
}

// ------------------------------------------------------ ExceptionSchedule

long ExceptionSchedule::group_base(long k) const {
  __int128 v = scale;
  for (long i = 0; i < k; ++i) {
    v *= ratio;
    if (v > static_cast<__int128>(std::numeric_limits<long>::max() / 2)) return -1;
  }
  return static_cast<long>(v);
}

Scalar ExceptionSchedule::group_value(long k) const {
  if (law == Law::Constant) return c;
  return c / Scalar::rational(Rational::integer(k));
}

std::optional<Scalar> ExceptionSchedule::lookup(long n) const {
  if (kind == Kind::List) {
    auto it = std::lower_bound(list.begin(), list.end(), n,
                               [](const auto& e, long pos) { return e.first < pos; });
    if (it != list.end() && it->first == n) return it->second;
    return std::nullopt;
  }
  for (long k = k0;; ++k) {
    long b = group_base(k);
    if (b < 0 || b + offsets.front() > n) break;
    for (long off : offsets)
      if (b + off == n) return group_value(k);
  }
  return std::nullopt;
}

void ExceptionSchedule::validate() const {
  if (kind == Kind::List) {
    long prev = 0;
    for (const auto& [pos, val] : list) {
      if (pos <= prev) throw InvalidWeight("exception positions must be strictly increasing and >= 1");
      if (val.is_zero()) throw InvalidWeight("exception value 0 at position " + std::to_string(pos));
      prev = pos;
    }
    return;
  }
  if (offsets.empty()) throw InvalidWeight("exception formula needs at least one offset");
  if (!std::is_sorted(offsets.begin(), offsets.end()) ||
      std::adjacent_find(offsets.begin(), offsets.end()) != offsets.end())
    throw InvalidWeight("exception offsets must be strictly increasing");
  if (scale < 1 || ratio < 2 || k0 < 1) throw InvalidWeight("exception formula needs scale >= 1, ratio >= 2, k0 >= 1");
  if (c.is_zero()) throw InvalidWeight("exception value constant is 0");
  long b0 = group_base(k0), b1 = group_base(k0 + 1);
  if (b0 < 0 || b1 < 0) throw InvalidWeight("exception formula overflows at its first group");
  if (b0 + offsets.front() < 1) throw InvalidWeight("exception positions must be >= 1");
  if (b0 + offsets.back() >= b1 + offsets.front())
    throw InvalidWeight("exception groups overlap; positions would not be strictly increasing");
}

// ------------------------------------------------------------ WeightSpec

namespace {

void require_field(const Scalar& s, Field f) {
  if (f == Field::Real && !s.is_real()) throw InvalidWeight("complex scalar in a real weight sequence");
  if (s.is_zero()) throw InvalidWeight("weight scalar is 0");
  if (!std::isfinite(s.value.real()) || !std::isfinite(s.value.imag()))
    throw InvalidWeight("weight scalar is not finite");
}

}  // namespace

WeightSpec::WeightSpec(Kind k, Field f) : kind_(std::move(k)), field_(f) {}

WeightSpec WeightSpec::constant(Scalar c, Field f) {
  require_field(c, f);
  return WeightSpec(Constant{c}, f);
}

WeightSpec WeightSpec::scaled(Scalar a, const WeightSpec& base) {
  Field f = base.field();
  if (!a.is_real()) f = Field::Complex;
  require_field(a, f);
  return WeightSpec(Scaled{a, std::make_shared<const WeightSpec>(base.with_field(f))}, f);
}

WeightSpec WeightSpec::prefix(std::vector<Scalar> prefix, Scalar tail, Field f) {
  for (const auto& s : prefix) require_field(s, f);
  require_field(tail, f);
  return WeightSpec(Prefix{std::move(prefix), tail}, f);
}

WeightSpec WeightSpec::sparse(Scalar base, ExceptionSchedule ex, Field f) {
  require_field(base, f);
  ex.validate();
  if (ex.kind == ExceptionSchedule::Kind::List)
    for (const auto& e : ex.list) require_field(e.second, f);
  else
    require_field(ex.c, f);
  return WeightSpec(Sparse{base, std::move(ex)}, f);
}

WeightSpec WeightSpec::ratio(Scalar base, EpsilonGenerator eps, Field f) {
  require_field(base, f);
  if (eps.c < 0) throw InvalidWeight("epsilon sequence must be nonnegative");
  if (eps.form == EpsilonGenerator::Form::Geometric && eps.r < 0)
    throw InvalidWeight("epsilon ratio must be nonnegative");
  for (double e : eps.list)
    if (!(e >= 0)) throw InvalidWeight("epsilon sequence must be nonnegative");
  return WeightSpec(Ratio{base, std::move(eps)}, f);
}

WeightSpec WeightSpec::with_field(Field f) const {
  WeightSpec out = *this;
  if (f == Field::Complex) out.field_ = f;
  return out;
}

Scalar WeightSpec::at(long n) const {
  if (n < 1) throw PreconditionError("weights are indexed from 1");
  Scalar w = std::visit(
      [n](const auto& k) -> Scalar {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, WeightSpec::Constant>) {
          return k.c;
        } else if constexpr (std::is_same_v<K, WeightSpec::Scaled>) {
          return k.a * k.base->at(n);
        } else if constexpr (std::is_same_v<K, WeightSpec::Prefix>) {
          return n <= static_cast<long>(k.prefix.size()) ? k.prefix[n - 1] : k.tail;
        } else if constexpr (std::is_same_v<K, WeightSpec::Sparse>) {
          if (auto e = k.exceptions.lookup(n)) return *e;
          return k.base;
        } else {
          auto en = k.eps.exact_at(n);
          auto ep = k.eps.exact_at(n - 1);
          if (en && ep && k.base.exact) {
            auto num = add(Rational{1, 1}, *en);
            auto den = add(Rational{1, 1}, *ep);
            if (num && den) {
              if (auto f = div(*num, *den)) return k.base * Scalar::rational(*f);
            }
          }
          double f = (1.0 + k.eps.at(n)) / (1.0 + k.eps.at(n - 1));
          return Scalar::complex(k.base.value * f);
        }
      },
      kind_);
  if (w.is_zero()) throw InvalidWeight("w_" + std::to_string(n) + " evaluates to 0");
  if (!std::isfinite(w.value.real()) || !std::isfinite(w.value.imag()))
    throw InvalidWeight("w_" + std::to_string(n) + " is not finite");
  return w;
}

bool WeightSpec::all_rational() const {
  return std::visit(
      [](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, WeightSpec::Constant>) {
          return k.c.exact.has_value();
        } else if constexpr (std::is_same_v<K, WeightSpec::Scaled>) {
          return k.a.exact && k.base->all_rational();
        } else if constexpr (std::is_same_v<K, WeightSpec::Prefix>) {
          return k.tail.exact && std::all_of(k.prefix.begin(), k.prefix.end(),
                                             [](const Scalar& s) { return s.exact.has_value(); });
        } else if constexpr (std::is_same_v<K, WeightSpec::Sparse>) {
          if (!k.base.exact) return false;
          if (k.exceptions.kind == ExceptionSchedule::Kind::List)
            return std::all_of(k.exceptions.list.begin(), k.exceptions.list.end(),
                               [](const auto& e) { return e.second.exact.has_value(); });
          return k.exceptions.c.exact.has_value();
        } else {
          return k.base.exact.has_value();
        }
      },
      kind_);
}

Scalar eval_weight(const WeightSpec& spec, long n) { return spec.at(n); }

bool structurally_equal(const WeightSpec& a, const WeightSpec& b) {
  return to_json(a) == to_json(b);
}

// ------------------------------------------------------ LogProductSeries

LogProductSeries LogProductSeries::compute(const WeightSpec& spec, long horizon) {
  if (horizon < 0) throw PreconditionError("horizon must be >= 0");
  LogProductSeries s;
  s.spec_ = std::make_shared<const WeightSpec>(spec);
  s.logs_.reserve(horizon + 1);
  s.logs_.push_back({0.0, 0.0});
  s.grow(horizon);
  return s;
}

LogProductSeries LogProductSeries::extended(long horizon) const {
  LogProductSeries s = *this;
  s.grow(horizon);
  return s;
}

void LogProductSeries::grow(long horizon) {
  for (long n = static_cast<long>(logs_.size()); n <= horizon; ++n) {
    Scalar w = spec_->at(n);
    logs_.push_back(logs_.back() + w.log_abs());
    double ph = w.phase();
    if (ph != 0.0 && phases_.empty()) phases_.assign(n, 0.0);
    if (!phases_.empty()) phases_.push_back(wrap_phase(phases_.back() + ph));
  }
}

LogProductSeries log_products(const WeightSpec& spec, long N) {
  return LogProductSeries::compute(spec, N);
}

// -------------------------------------------------------------- TailForm

TailForm tail_form(const WeightSpec& spec) {
  return std::visit(
      [](const auto& k) -> TailForm {
        using K = std::decay_t<decltype(k)>;
        TailForm t;
        if constexpr (std::is_same_v<K, WeightSpec::Constant>) {
          t.kind = TailForm::Kind::Affine;
          t.rate = k.c.log_abs();
          t.modulus = k.c.exact_abs();
        } else if constexpr (std::is_same_v<K, WeightSpec::Scaled>) {
          t = tail_form(*k.base);
          if (t.kind == TailForm::Kind::Unknown) return t;
          t.rate += k.a.log_abs();
          if (t.modulus) t.modulus = mul(t.modulus, k.a.exact_abs());
        } else if constexpr (std::is_same_v<K, WeightSpec::Prefix>) {
          t.kind = TailForm::Kind::Affine;
          t.rate = k.tail.log_abs();
          t.modulus = k.tail.exact_abs();
          t.from = static_cast<long>(k.prefix.size());
        } else if constexpr (std::is_same_v<K, WeightSpec::Sparse>) {
          t.rate = k.base.log_abs();
          t.modulus = k.base.exact_abs();
          const auto& ex = k.exceptions;
          if (ex.kind == ExceptionSchedule::Kind::List) {
            t.kind = TailForm::Kind::Affine;
            t.from = ex.list.empty() ? 0 : ex.list.back().first;
          } else if (ex.law == ExceptionSchedule::Law::Constant && ex.c.abs() == k.base.abs()) {
            t.kind = TailForm::Kind::Affine;
          } else {
            t.kind = TailForm::Kind::Sparse;
            t.schedule = ex;
            t.base_abs = k.base.abs();
          }
        } else {
          t.rate = k.base.log_abs();
          t.modulus = k.base.exact_abs();
          if (k.eps.constant_tail()) {
            t.kind = TailForm::Kind::Affine;
            t.from = 1;
          } else if (k.eps.vanishes()) {
            t.kind = TailForm::Kind::Vanishing;
            t.eps = k.eps;
          }
        }
        return t;
      },
      spec.kind());
}

namespace {

double eps_sup(const EpsilonGenerator& e) {
  switch (e.form) {
    case EpsilonGenerator::Form::Power: return e.s >= 0 ? e.c : std::numeric_limits<double>::infinity();
    case EpsilonGenerator::Form::Geometric: return e.r <= 1 ? e.c * e.r : std::numeric_limits<double>::infinity();
    case EpsilonGenerator::Form::List: {
      double m = 0;
      for (double v : e.list) m = std::max(m, v);
      return m;
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

double lower_bound_modulus(const WeightSpec& spec) {
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, WeightSpec::Constant>) {
          return k.c.abs();
        } else if constexpr (std::is_same_v<K, WeightSpec::Scaled>) {
          return k.a.abs() * lower_bound_modulus(*k.base);
        } else if constexpr (std::is_same_v<K, WeightSpec::Prefix>) {
          double m = k.tail.abs();
          for (const auto& s : k.prefix) m = std::min(m, s.abs());
          return m;
        } else if constexpr (std::is_same_v<K, WeightSpec::Sparse>) {
          double m = k.base.abs();
          const auto& ex = k.exceptions;
          if (ex.kind == ExceptionSchedule::Kind::List) {
            for (const auto& e : ex.list) m = std::min(m, e.second.abs());
            return m;
          }
          if (ex.law == ExceptionSchedule::Law::Reciprocal) return 0.0;
          return std::min(m, ex.c.abs());
        } else {
          return k.base.abs() / (1.0 + eps_sup(k.eps));
        }
      },
      spec.kind());
}

double upper_bound_modulus(const WeightSpec& spec) {
  return std::visit(
      [](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, WeightSpec::Constant>) {
          return k.c.abs();
        } else if constexpr (std::is_same_v<K, WeightSpec::Scaled>) {
          return k.a.abs() * upper_bound_modulus(*k.base);
        } else if constexpr (std::is_same_v<K, WeightSpec::Prefix>) {
          double m = k.tail.abs();
          for (const auto& s : k.prefix) m = std::max(m, s.abs());
          return m;
        } else if constexpr (std::is_same_v<K, WeightSpec::Sparse>) {
          double m = k.base.abs();
          const auto& ex = k.exceptions;
          if (ex.kind == ExceptionSchedule::Kind::List) {
            for (const auto& e : ex.list) m = std::max(m, e.second.abs());
            return m;
          }
          if (ex.law == ExceptionSchedule::Law::Reciprocal)
            return std::max(m, ex.c.abs() / static_cast<double>(ex.k0));
          return std::max(m, ex.c.abs());
        } else {
          return k.base.abs() * (1.0 + eps_sup(k.eps));
        }
      },
      spec.kind());
}

// ----------------------------------------------------------- summability

namespace {

// Upper bound for sum_{n > N} exp(-p L_n) when exceptions sit on a
// geometric schedule: between exceptions the terms decay with ratio q.
double sparse_tail_majorant(const LogProductSeries& s, const TailForm& tf, double p) {
  const auto& ex = *tf.schedule;
  const long N = s.horizon();
  const double q = std::exp(-p * tf.rate);
  double log_t = -p * s.log(N);
  double total = 0.0;
  long prev = N;
  auto segment = [&](long len) {
    // terms prev+1 .. prev+len, each a factor q below the previous
    if (len <= 0) return;
    total += std::exp(log_t) * q * (-std::expm1(len * std::log(q))) / (1.0 - q);
    log_t += len * std::log(q);
  };
  for (long k = ex.k0; k < ex.k0 + 64; ++k) {
    long b = ex.group_base(k);
    if (b < 0) break;
    double jump = std::max(0.0, std::log(tf.base_abs / ex.group_value(k).abs()));
    for (long off : ex.offsets) {
      long pos = b + off;
      if (pos <= N) continue;
      segment(pos - prev - 1);
      log_t += -p * tf.rate + p * jump;
      total += std::exp(log_t);
      prev = pos;
    }
    if (log_t < -800.0 && b > N) break;
  }
  total += std::exp(log_t) * q / (1.0 - q);
  return total;
}

}  // namespace

SummabilityVerdict summability(const LogProductSeries& series, double p, const WeightsConfig& cfg) {
  if (p < 1) throw PreconditionError("summability needs p >= 1");
  SummabilityVerdict out;
  const long N = series.horizon();
  out.horizon = N;
  std::vector<double> terms;
  terms.reserve(N);
  bool guard = false;
  for (long n = 1; n <= N; ++n) {
    double e = -p * series.log(n);
    if (e > cfg.divergence_log) guard = true;
    terms.push_back(std::exp(e));
  }
  out.partial_sum = compensated_sum(terms);
  if (guard) {
    out.status = SeriesStatus::Diverges;
    out.tail_rule = "divergence guard: -p L_n exceeds threshold";
    return out;
  }

  TailForm tf = tail_form(series.spec());
  if (tf.kind != TailForm::Kind::Unknown) {
    const double q = std::exp(-p * tf.rate);
    if (tf.rate > 0) {
      out.status = SeriesStatus::Converges;
      out.tail_rule = "symbolic rate, geometric q=" + std::to_string(q);
      if (tf.kind == TailForm::Kind::Affine) {
        LogProductSeries ext = tf.from > N ? series.extended(tf.from) : series;
        double head = 0.0;
        for (long n = N + 1; n <= ext.horizon(); ++n) head += std::exp(-p * ext.log(n));
        out.tail_bound = head + std::exp(-p * ext.log(ext.horizon())) * q / (1.0 - q);
      } else if (tf.kind == TailForm::Kind::Vanishing) {
        out.tail_bound = std::exp(-p * tf.rate * static_cast<double>(N + 1)) / (1.0 - q);
      } else {
        out.tail_bound = sparse_tail_majorant(series, tf, p);
        out.tail_rule = "symbolic rate with sparse exceptions, q=" + std::to_string(q);
      }
      return out;
    }
    if (tf.rate < 0) {
      out.status = SeriesStatus::Diverges;
      out.tail_rule = "symbolic rate: terms grow";
      return out;
    }
    if (tf.kind == TailForm::Kind::Affine || tf.kind == TailForm::Kind::Vanishing) {
      out.status = SeriesStatus::Diverges;
      out.tail_rule = "constant modulus tail: terms do not vanish";
      return out;
    }
  }

  SeriesCertificate cert = certify_series(terms, 1, cfg.series);
  out.status = cert.status;
  out.tail_rule = cert.rule;
  out.tail_bound = cert.tail_bound;
  return out;
}

SummabilityVerdict summability(const WeightSpec& spec, double p, long horizon,
                               const WeightsConfig& cfg) {
  return summability(LogProductSeries::compute(spec, horizon), p, cfg);
}

// -------------------------------------------------------------- classify

namespace {

Verdict make(Status s, Rule r, long horizon, nlohmann::json ev) {
  Verdict v;
  v.status = s;
  v.rule = r;
  v.horizon = horizon;
  v.evidence = std::move(ev);
  return v;
}

Status from_series(SeriesStatus s) {
  if (s == SeriesStatus::Converges) return Status::Established;
  if (s == SeriesStatus::Diverges) return Status::Refuted;
  return Status::Undecided;
}

}  // namespace

Classification classify(const WeightSpec& spec, double p, long horizon, const WeightsConfig& cfg) {
  LogProductSeries s = LogProductSeries::compute(spec, horizon);
  TailForm tf = tail_form(spec);
  SummabilityVerdict sv = summability(s, p, cfg);

  double max_l = 0.0;
  double tail_min = std::numeric_limits<double>::infinity();
  const long tail_start = horizon - static_cast<long>(cfg.series.window_fraction * horizon);
  for (long n = 1; n <= horizon; ++n) {
    max_l = std::max(max_l, s.log(n));
    if (n >= tail_start) tail_min = std::min(tail_min, s.log(n));
  }
  nlohmann::json base_ev = {{"max_log_product", max_l},
                            {"trailing_min_log_product", tail_min},
                            {"threshold", cfg.divergence_log}};
  if (tf.kind != TailForm::Kind::Unknown) base_ev["rate"] = tf.rate;

  // Is L_n bounded above (Refuted) or driven to +infinity (Established)?
  Status sym = Status::Undecided;
  std::string sym_reason;
  if (tf.kind != TailForm::Kind::Unknown) {
    if (tf.rate > 0) {
      sym = Status::Established;
      sym_reason = "positive growth rate";
    } else if (tf.rate < 0) {
      sym = Status::Refuted;
      sym_reason = "negative growth rate";
    } else if (tf.kind == TailForm::Kind::Affine || tf.kind == TailForm::Kind::Vanishing) {
      sym = Status::Refuted;
      sym_reason = "products eventually of constant modulus";
    } else if (tf.schedule->law == ExceptionSchedule::Law::Reciprocal) {
      sym = Status::Refuted;
      sym_reason = "unit base with exceptions shrinking to 0";
    }
  }

  Classification c;
  auto ev = base_ev;
  if (sym != Status::Undecided) {
    ev["reason"] = sym_reason;
    c.hypercyclic = make(sym, Rule::UnboundedProducts, horizon, ev);
    c.mixing = make(sym, Rule::DivergentProducts, horizon, ev);
  } else {
    if (max_l > cfg.divergence_log) {
      ev["reason"] = "log product crosses threshold";
      c.hypercyclic = make(Status::Established, Rule::UnboundedProducts, horizon, ev);
    } else {
      c.hypercyclic = make(Status::Undecided, Rule::UnboundedProducts, horizon, base_ev);
    }
    if (tail_min > cfg.divergence_log) {
      auto e2 = base_ev;
      e2["reason"] = "log product above threshold over the trailing window";
      c.mixing = make(Status::Established, Rule::DivergentProducts, horizon, e2);
    } else if (sv.status == SeriesStatus::Converges) {
      auto e2 = base_ev;
      e2["reason"] = "summable inverse products force divergence";
      c.mixing = make(Status::Established, Rule::DivergentProducts, horizon, e2);
    } else {
      c.mixing = make(Status::Undecided, Rule::DivergentProducts, horizon, base_ev);
    }
  }
  // mixing implies hypercyclic
  if (c.mixing.established() && !c.hypercyclic.established()) {
    c.hypercyclic.status = Status::Established;
    c.hypercyclic.evidence["reason"] = "implied by divergent products";
  }
  if (c.hypercyclic.refuted() && !c.mixing.refuted()) {
    c.mixing.status = Status::Refuted;
    c.mixing.evidence["reason"] = "products bounded above";
  }

  nlohmann::json sev = {{"p", p},
                        {"partial_sum", sv.partial_sum},
                        {"tail_rule", sv.tail_rule},
                        {"summability", to_string(sv.status)}};
  if (sv.tail_bound >= 0) sev["tail_bound"] = sv.tail_bound;
  c.chaotic_fhc = make(from_series(sv.status), Rule::ChaosSummability, horizon, sev);
  c.has_nontrivial_invariant_measure =
      make(from_series(sv.status), Rule::InvariantMeasureSummability, horizon, sev);
  return c;
}

// ----------------------------------------------------------- fixed point

FixedPoint fixed_point(const WeightSpec& spec, double p, long N, const WeightsConfig& cfg) {
  if (N < 0) throw PreconditionError("truncation must be >= 0");
  const long H = std::max(N, cfg.horizon);
  LogProductSeries s = LogProductSeries::compute(spec, H);
  SummabilityVerdict sv = summability(s, p, cfg);
  if (sv.status != SeriesStatus::Converges)
    throw NotSummable("sum of |w_1...w_n|^-p is " + to_string(sv.status) + " at horizon " +
                      std::to_string(H));
  FixedPoint fp;
  fp.x.resize(N + 1);
  for (long n = 0; n <= N; ++n) {
    fp.x[n].log_abs = -s.log_dd(n);
    fp.x[n].phase = wrap_phase(-s.phase(n));
  }
  double rest = 0.0;
  for (long n = N + 1; n <= H; ++n) rest += std::exp(-p * s.log(n));
  double tail = sv.tail_bound >= 0 ? rest + sv.tail_bound : std::numeric_limits<double>::infinity();
  fp.tail_bound = std::pow(tail, 1.0 / p);
  return fp;
}

// ----------------------------------------------------------------- shift

LogVector apply_shift_power(const LogProductSeries& series, const LogVector& x, long n) {
  if (n < 0) throw PreconditionError("shift power must be >= 0");
  const long len = static_cast<long>(x.size());
  if (n >= len) return {};
  if (series.horizon() < len - 1)
    throw PreconditionError("log product series shorter than the vector");
  LogVector out(len - n);
  for (long j = 0; j + n < len; ++j) {
    const LogCoord& src = x[j + n];
    if (src.is_zero()) continue;
    out[j].log_abs = (src.log_abs + series.log_dd(j + n)) - series.log_dd(j);
    out[j].phase = wrap_phase(wrap_phase(src.phase + series.phase(j + n)) - series.phase(j));
  }
  return out;
}

// ------------------------------------------------- certificate from orbit

Verdict summability_certificate_check(const LogVector& x, const std::vector<long>& n_set,
                                      const WeightSpec& spec, double p,
                                      std::pair<double, double> bounds, const WeightsConfig& cfg) {
  if (n_set.empty()) throw EmptyWitnessSet("no sampled times");
  if (!std::is_sorted(n_set.begin(), n_set.end())) throw PreconditionError("N_set must be sorted");
  const auto [c1, c2] = bounds;
  const long len = static_cast<long>(x.size());
  LogProductSeries s = LogProductSeries::compute(spec, std::max(len - 1, 0L));

  double worst_norm = kNegInf;
  double worst_coord = std::numeric_limits<double>::infinity();
  bool norm_ok = true, coord_ok = c2 > 0;
  for (long n : n_set) {
    LogVector y = apply_shift_power(s, x, n);
    double ln = log_norm(y, p);
    worst_norm = std::max(worst_norm, ln);
    if (ln > std::log(c1)) norm_ok = false;
    double c0 = (y.empty() || y[0].is_zero()) ? 0.0 : std::exp(y[0].log_abs.value());
    worst_coord = std::min(worst_coord, c0);
    if (c0 < c2) coord_ok = false;
  }
  double density = 0.0;
  for (size_t i = 0; i < n_set.size(); ++i)
    density = std::max(density, static_cast<double>(i + 1) / static_cast<double>(n_set[i] + 1));

  bool hypotheses = norm_ok && coord_ok && density > 0;
  SummabilityVerdict sv = summability(spec, p, cfg.horizon, cfg);
  nlohmann::json ev = {{"sup_log_norm", worst_norm},
                       {"inf_coord0", worst_coord},
                       {"upper_density_estimate", density},
                       {"hypotheses_hold", hypotheses},
                       {"summability", to_string(sv.status)}};
  Verdict v;
  v.rule = Rule::OrbitCertificate;
  v.horizon = cfg.horizon;
  if (!hypotheses) {
    v.status = Status::Refuted;
  } else if (sv.status == SeriesStatus::Converges) {
    v.status = Status::Established;
  } else if (sv.status == SeriesStatus::Diverges) {
    v.status = Status::Refuted;
    ev["contradiction"] = true;
  }
  v.evidence = ev;
  return v;
}

}  // namespace shiftlab
