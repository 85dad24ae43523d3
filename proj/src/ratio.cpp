#include "shiftlab/ratio.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace shiftlab {

std::string to_string(RatioForm::Kind k) {
  switch (k) {
    case RatioForm::Kind::EventuallyConstant: return "eventually-constant";
    case RatioForm::Kind::Convergent: return "convergent";
    case RatioForm::Kind::BoundedOscillating: return "bounded-oscillating";
    case RatioForm::Kind::Drift: return "drift";
    case RatioForm::Kind::Oscillating: return "oscillating";
    case RatioForm::Kind::Unknown: return "unknown";
  }
  return "unknown";
}

double RatioForm::correction(long n) const {
  double c = 0.0;
  if (eps_u) c += std::log1p(eps_u->at(n));
  if (eps_v) c -= std::log1p(eps_v->at(n));
  return c;
}

namespace {

bool same_modulus(const std::optional<Rational>& ea, double a, const std::optional<Rational>& eb,
                  double b) {
  if (ea && eb) return *ea == *eb;
  return std::abs(a - b) <= 1e-15 * std::max({1.0, std::abs(a), std::abs(b)});
}

int sgn(double x) { return (x > 0) - (x < 0); }

RatioForm drift(int sign, std::string reason) {
  RatioForm f;
  f.kind = RatioForm::Kind::Drift;
  f.sign = sign;
  f.liminf_zero = sign < 0;
  f.limsup_inf = sign > 0;
  f.reason = std::move(reason);
  return f;
}

// Sign of log|value_k / base| for large k.
int sparse_direction(const TailForm& t) {
  const auto& ex = *t.schedule;
  if (ex.law == ExceptionSchedule::Law::Reciprocal) return -1;
  return sgn(std::log(ex.c.abs() / t.base_abs));
}

bool same_schedule(const TailForm& a, const TailForm& b) {
  const auto& x = *a.schedule;
  const auto& y = *b.schedule;
  return x.scale == y.scale && x.ratio == y.ratio && x.k0 == y.k0 && x.law == y.law &&
         same_modulus(x.c.exact_abs(), x.c.abs(), y.c.exact_abs(), y.c.abs()) &&
         std::abs(a.base_abs - b.base_abs) <= 1e-15 * a.base_abs;
}

}  // namespace

RatioForm ratio_form(const WeightSpec& u, const WeightSpec& v) {
  RatioForm f;
  if (structurally_equal(u, v)) {
    f.kind = RatioForm::Kind::EventuallyConstant;
    f.reason = "identical weight sequences";
    return f;
  }
  const auto* su = std::get_if<WeightSpec::Scaled>(&u.kind());
  const auto* sv = std::get_if<WeightSpec::Scaled>(&v.kind());
  if (su && sv && structurally_equal(*su->base, *sv->base)) {
    if (same_modulus(su->a.exact_abs(), su->a.abs(), sv->a.exact_abs(), sv->a.abs())) {
      f.kind = RatioForm::Kind::EventuallyConstant;
      f.reason = "scaled copies with equal moduli";
      return f;
    }
    return drift(sgn(su->a.log_abs() - sv->a.log_abs()), "scaled copies with distinct moduli");
  }

  TailForm tu = tail_form(u), tv = tail_form(v);
  if (tu.kind == TailForm::Kind::Unknown || tv.kind == TailForm::Kind::Unknown) {
    f.reason = "no symbolic tail for one of the sequences";
    return f;
  }
  if (!same_modulus(tu.modulus, std::exp(tu.rate), tv.modulus, std::exp(tv.rate)))
    return drift(sgn(tu.rate - tv.rate), "distinct asymptotic growth rates");

  const bool sp_u = tu.kind == TailForm::Kind::Sparse;
  const bool sp_v = tv.kind == TailForm::Kind::Sparse;
  if (!sp_u && !sp_v) {
    f.from = std::max(tu.from, tv.from);
    if (tu.kind == TailForm::Kind::Affine && tv.kind == TailForm::Kind::Affine) {
      f.kind = RatioForm::Kind::EventuallyConstant;
      f.reason = "equal constant tails";
      return f;
    }
    f.kind = RatioForm::Kind::Convergent;
    f.eps_u = tu.eps;
    f.eps_v = tv.eps;
    f.reason = "equal rates, vanishing telescoping corrections";
    return f;
  }
  if (sp_u != sp_v) {
    // The sparse side accumulates log|value/base| over its exceptions, unboundedly.
    int d = sp_u ? sparse_direction(tu) : -sparse_direction(tv);
    return drift(d, "sparse exceptions accumulate against a bounded correction");
  }
  if (!same_schedule(tu, tv)) {
    f.reason = "sparse schedules differ";
    return f;
  }

  // Same group positions: walk the merged offsets of one group.
  std::map<long, int> change;
  for (long o : tu.schedule->offsets) change[o] += 1;
  for (long o : tv.schedule->offsets) change[o] -= 1;
  int c = 0, c_max = 0, c_min = 0;
  for (const auto& [o, d] : change) {
    c += d;
    c_max = std::max(c_max, c);
    c_min = std::min(c_min, c);
  }
  const int dir = sparse_direction(tu);
  if (c != 0) return drift(sgn(static_cast<double>(c)) * dir, "unbalanced exception groups");
  if (c_max == 0 && c_min == 0) {
    f.kind = RatioForm::Kind::EventuallyConstant;
    f.reason = "identical exception groups";
    return f;
  }
  if (tu.schedule->law == ExceptionSchedule::Law::Reciprocal) {
    f.kind = RatioForm::Kind::Oscillating;
    // an excursion c * log(value_k / base) with value_k -> 0
    f.liminf_zero = c_max > 0;
    f.limsup_inf = c_min < 0;
    f.reason = "balanced exception groups with excursions of size log k";
    return f;
  }
  f.kind = RatioForm::Kind::BoundedOscillating;
  f.reason = "balanced exception groups with bounded excursions";
  return f;
}

std::vector<std::optional<Rational>> exact_ratios(const WeightSpec& u, const WeightSpec& v, long N) {
  std::vector<std::optional<Rational>> out(N + 1);
  out[0] = Rational{1, 1};
  for (long n = 1; n <= N; ++n) {
    if (!out[n - 1]) break;
    Scalar wu = u.at(n), wv = v.at(n);
    out[n] = mul(out[n - 1], div(wu.exact, wv.exact));
  }
  return out;
}

RatioLimit ratio_limit(const LogProductSeries& lu, const LogProductSeries& lv, const LimitConfig& cfg) {
  RatioLimit out;
  const long N = std::min(lu.horizon(), lv.horizon());
  RatioForm rf = ratio_form(lu.spec(), lv.spec());
  out.evidence = {{"ratio_form", to_string(rf.kind)}, {"reason", rf.reason}, {"horizon", N}};
  auto log_lambda = [&](const LogProductSeries& a, const LogProductSeries& b, long n) {
    return (a.log_dd(n) - b.log_dd(n)).value();
  };

  switch (rf.kind) {
    case RatioForm::Kind::EventuallyConstant: {
      long m = std::max(N, rf.from);
      LogProductSeries a = m > lu.horizon() ? lu.extended(m) : lu;
      LogProductSeries b = m > lv.horizon() ? lv.extended(m) : lv;
      out.status = Status::Established;
      out.log_limit = log_lambda(a, b, m);
      out.rule = "eventually constant ratio";
      return out;
    }
    case RatioForm::Kind::Convergent:
      out.status = Status::Established;
      out.log_limit = log_lambda(lu, lv, N) - rf.correction(N);
      out.rule = "ratio converges; corrections vanish";
      return out;
    case RatioForm::Kind::Drift:
    case RatioForm::Kind::Oscillating:
    case RatioForm::Kind::BoundedOscillating:
      out.status = Status::Refuted;
      out.rule = "no limit in (0, infinity)";
      return out;
    case RatioForm::Kind::Unknown: break;
  }

  const long start = N - static_cast<long>(cfg.window_fraction * N);
  double sum = 0.0, sq = 0.0, max_abs_log = 0.0;
  long cnt = 0;
  for (long n = std::max(start, 1L); n <= N; ++n) {
    double l = log_lambda(lu, lv, n);
    max_abs_log = std::max(max_abs_log, std::abs(l));
    double x = std::exp(l);
    sum += x;
    sq += x * x;
    ++cnt;
  }
  if (cnt == 0) return out;
  double mean = sum / cnt;
  double sd = std::sqrt(std::max(0.0, sq / cnt - mean * mean));
  out.evidence["tail_mean"] = mean;
  out.evidence["tail_std"] = sd;
  if (max_abs_log > cfg.divergence_log) {
    out.status = Status::Refuted;
    out.rule = "ratio leaves the band";
  } else if (sd <= cfg.stability * (1.0 + std::abs(mean))) {
    out.status = Status::Established;
    out.log_limit = std::log(mean);
    out.rule = "tail stabilization";
  } else {
    out.rule = "tail not stable";
  }
  return out;
}

}  // namespace shiftlab
