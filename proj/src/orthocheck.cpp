#include "shiftlab/orthocheck.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "shiftlab/errors.hpp"
#include "shiftlab/hellinger.hpp"
#include "shiftlab/json_io.hpp"

namespace shiftlab {

namespace {

Verdict verdict(Rule r, long horizon) {
  Verdict v;
  v.rule = r;
  v.horizon = horizon;
  return v;
}

struct Extremes {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  long argmin = 0, argmax = 0;
};

Extremes extremes(const RatioSeries& rs, long from, long to) {
  Extremes e;
  for (long n = from; n <= to; ++n) {
    double x = rs.log(n);
    if (x < e.min) {
      e.min = x;
      e.argmin = n;
    }
    if (x > e.max) {
      e.max = x;
      e.argmax = n;
    }
  }
  return e;
}

// Sliding max (sign = +1) or min (sign = -1) of log lambda over windows [n, n+N].
std::vector<double> sliding(const RatioSeries& rs, long N, int sign) {
  const long H = rs.horizon();
  std::vector<double> out;
  if (H - N < 1) return out;
  out.reserve(H - N);
  std::deque<long> q;
  auto better = [&](long a, long b) { return sign * rs.log(a) >= sign * rs.log(b); };
  for (long n = 1; n <= H; ++n) {
    while (!q.empty() && better(n, q.back())) q.pop_back();
    q.push_back(n);
    if (q.front() < n - N) q.pop_front();
    if (n - N >= 1) out.push_back(rs.log(q.front()));
  }
  return out;
}

long longest_run(const RatioSeries& rs, double threshold, int sign) {
  long best = 0, cur = 0;
  for (long n = 0; n <= rs.horizon(); ++n) {
    cur = sign * rs.log(n) > threshold ? cur + 1 : 0;
    best = std::max(best, cur);
  }
  return best;
}

bool both_summable(const WeightSpec& u, const WeightSpec& v, double p, long horizon) {
  WeightsConfig wc;
  return summability(u, p, horizon, wc).status == SeriesStatus::Converges &&
         summability(v, p, horizon, wc).status == SeriesStatus::Converges;
}

}  // namespace

RatioSeries ratio_series(const LogProductSeries& lu, const LogProductSeries& lv) {
  const long N = std::min(lu.horizon(), lv.horizon());
  RatioSeries rs;
  rs.lambdas_log.resize(N + 1);
  for (long n = 0; n <= N; ++n) rs.lambdas_log[n] = lu.log_dd(n) - lv.log_dd(n);
  if (lu.has_phases() || lv.has_phases()) {
    rs.phases.resize(N + 1);
    for (long n = 0; n <= N; ++n) rs.phases[n] = wrap_phase(lu.phase(n) - lv.phase(n));
  }
  return rs;
}

Verdict similarity_test(const WeightSpec& u, const WeightSpec& v, long horizon, const OrthoConfig& cfg) {
  Verdict out = verdict(Rule::Similarity, horizon);
  RatioSeries rs = ratio_series(LogProductSeries::compute(u, horizon), LogProductSeries::compute(v, horizon));
  Extremes all = extremes(rs, 1, horizon);
  RatioForm rf = ratio_form(u, v);
  out.evidence = {{"claim", "similar"},
                  {"ratio_form", to_string(rf.kind)},
                  {"reason", rf.reason},
                  {"min_log_lambda", all.min},
                  {"argmin", all.argmin},
                  {"max_log_lambda", all.max},
                  {"argmax", all.argmax},
                  {"threshold", cfg.divergence_log}};
  switch (rf.kind) {
    case RatioForm::Kind::EventuallyConstant:
    case RatioForm::Kind::Convergent:
    case RatioForm::Kind::BoundedOscillating:
      out.status = Status::Established;
      return out;
    case RatioForm::Kind::Drift:
    case RatioForm::Kind::Oscillating:
      out.status = Status::Refuted;
      out.evidence["liminf_zero"] = rf.liminf_zero;
      out.evidence["limsup_infinite"] = rf.limsup_inf;
      return out;
    case RatioForm::Kind::Unknown: break;
  }
  if (std::max(-all.min, all.max) > cfg.divergence_log) {
    out.status = Status::Refuted;
    out.evidence["reason"] = "log lambda crosses the threshold";
    return out;
  }
  // no new extremes over the second half of the horizon
  Extremes early = extremes(rs, 1, horizon / 2);
  Extremes late = extremes(rs, horizon / 2 + 1, horizon);
  if (horizon >= 16 && late.min >= early.min && late.max <= early.max) {
    out.status = Status::Established;
    out.evidence["reason"] = "band observed with a stable tail";
  } else {
    out.evidence["reason"] = "band still widening";
  }
  return out;
}

Verdict window_orthogonality_test(const WeightSpec& u, const WeightSpec& v, long n_window, long horizon,
                                  const OrthoConfig& cfg) {
  if (n_window < 0) throw PreconditionError("window length must be >= 0");
  Verdict out = verdict(Rule::WindowedRatio, horizon);
  RatioSeries rs = ratio_series(LogProductSeries::compute(u, horizon), LogProductSeries::compute(v, horizon));
  const double T = cfg.divergence_log;
  out.evidence = {{"claim", "orthogonal"},
                  {"threshold", T},
                  {"n_window", n_window},
                  {"longest_run_below", longest_run(rs, T, -1)},
                  {"longest_run_above", longest_run(rs, T, +1)}};
  RatioForm rf = ratio_form(u, v);
  if (rf.kind == RatioForm::Kind::Drift) {
    out.status = Status::Established;
    out.evidence["reason"] = "log lambda drifts to " + std::string(rf.sign < 0 ? "-" : "+") + "infinity: " + rf.reason;
    return out;
  }
  bool low_all = true, high_all = true;
  nlohmann::json per_n = nlohmann::json::array();
  for (long N = 0; N <= n_window; ++N) {
    std::vector<double> wmax = sliding(rs, N, +1), wmin = sliding(rs, N, -1);
    const long len = static_cast<long>(wmax.size());
    bool low = len >= cfg.epochs, high = len >= cfg.epochs;
    for (int e = 0; e < cfg.epochs && len >= cfg.epochs; ++e) {
      long a = len * e / cfg.epochs, b = len * (e + 1) / cfg.epochs;
      bool lo_hit = false, hi_hit = false;
      for (long i = a; i < b; ++i) {
        lo_hit = lo_hit || wmax[i] < -T;
        hi_hit = hi_hit || wmin[i] > T;
      }
      low = low && lo_hit;
      high = high && hi_hit;
    }
    double inf_max = len ? *std::min_element(wmax.begin(), wmax.end()) : 0.0;
    double sup_min = len ? *std::max_element(wmin.begin(), wmin.end()) : 0.0;
    per_n.push_back({{"N", N}, {"min_windowed_max", inf_max}, {"max_windowed_min", sup_min}, {"small", low}, {"large", high}});
    low_all = low_all && low;
    high_all = high_all && high;
  }
  out.evidence["windows"] = per_n;
  if (low_all || high_all) {
    out.status = Status::Established;
    out.evidence["reason"] = low_all ? "windowed max below -threshold in every epoch"
                                     : "windowed min above +threshold in every epoch";
  } else {
    out.evidence["reason"] = "no window condition certified";
  }
  return out;
}

Verdict scalar_pair_test(const std::string& tag, const Scalar& a, const Scalar& b) {
  if (a.is_zero() || b.is_zero()) throw ZeroScalar("scalar pair needs non-zero scalars");
  Verdict out = verdict(Rule::ScalarPair, 0);
  bool equal;
  auto ea = a.exact_abs(), eb = b.exact_abs();
  if (ea && eb)
    equal = *ea == *eb;
  else
    equal = std::abs(a.abs() - b.abs()) <= 1e-12 * std::max(a.abs(), b.abs());
  out.status = equal ? Status::Refuted : Status::Established;
  out.evidence = {{"operator", tag},
                  {"a", to_json(a)},
                  {"b", to_json(b)},
                  {"claim", "orthogonal"},
                  {"reason", equal ? "equal moduli: the phase-symmetrized measure is invariant for both"
                                   : "distinct moduli"}};
  return out;
}

nlohmann::json to_json(const PeriodicWitness& w) {
  nlohmann::json head = nlohmann::json::array();
  for (long i = 0; i < static_cast<long>(w.vector.size()) && head.size() < 8; ++i)
    if (!w.vector[i].is_zero()) head.push_back({{"n", i}, {"log_abs", w.vector[i].log_abs.value()}, {"phase", w.vector[i].phase}});
  return {{"d", w.d},
          {"j", w.j},
          {"C", to_json(w.C)},
          {"checked_m", w.checked_m},
          {"numeric", w.numeric},
          {"vector_length", w.vector.size()},
          {"leading_coordinates", head}};
}

namespace {

struct PeriodicContext {
  LogProductSeries lu, lv;
  RatioSeries rs;
  std::vector<std::optional<Rational>> exact;
};

PeriodicContext periodic_context(const WeightSpec& u, const WeightSpec& v, double p, long H, long summability_horizon) {
  if (!both_summable(u, v, p, summability_horizon))
    throw NotSummable("a shared periodic point needs summable inverse products for both weights");
  PeriodicContext c{LogProductSeries::compute(u, H), LogProductSeries::compute(v, H), {}, {}};
  c.rs = ratio_series(c.lu, c.lv);
  if (u.all_rational() && v.all_rational()) c.exact = exact_ratios(u, v, H);
  return c;
}

std::optional<PeriodicWitness> check(const PeriodicContext& c, long d, long j, long m_check, double tol) {
  bool numeric = false;
  for (long m = 1; m <= m_check; ++m) {
    long n = d * m + j;
    if (!c.exact.empty() && c.exact[n] && c.exact[j]) {
      if (!(*c.exact[n] == *c.exact[j])) return std::nullopt;
      continue;
    }
    numeric = true;
    if (std::abs((c.rs.lambdas_log[n] - c.rs.lambdas_log[j]).value()) > tol) return std::nullopt;
    if (!c.rs.phases.empty() && std::abs(wrap_phase(c.rs.phases[n] - c.rs.phases[j])) > tol) return std::nullopt;
  }
  PeriodicWitness w;
  w.d = d;
  w.j = j;
  w.checked_m = m_check;
  w.numeric = numeric;
  if (!c.exact.empty() && c.exact[j])
    w.C = Scalar::rational(*c.exact[j]);
  else
    w.C = Scalar::complex(std::polar(std::exp(c.rs.log(j)), c.rs.phases.empty() ? 0.0 : c.rs.phases[j]));
  const long len = d * m_check + j + 1;
  w.vector.resize(len);
  for (long n = j; n < len; n += d) {
    w.vector[n].log_abs = -c.lu.log_dd(n);
    w.vector[n].phase = wrap_phase(-c.lu.phase(n));
  }
  return w;
}

}  // namespace

std::optional<PeriodicWitness> periodic_witness_at(const WeightSpec& u, const WeightSpec& v, double p, long d,
                                                   long j, long m_check, long horizon, const OrthoConfig& cfg) {
  if (d < 1 || j < 0 || j >= d || m_check < 1) throw PreconditionError("need d >= 1, 0 <= j < d, m_check >= 1");
  PeriodicContext c = periodic_context(u, v, p, d * m_check + j, horizon);
  return check(c, d, j, m_check, cfg.log_tol);
}

std::optional<PeriodicWitness> shared_periodic_point(const WeightSpec& u, const WeightSpec& v, double p,
                                                     long d_max, long m_check, long horizon,
                                                     const OrthoConfig& cfg) {
  if (d_max < 1 || m_check < 1) throw PreconditionError("need d_max >= 1 and m_check >= 1");
  PeriodicContext c = periodic_context(u, v, p, d_max * (m_check + 1), horizon);
  for (long d = 1; d <= d_max; ++d)
    for (long j = 0; j < d; ++j)
      if (auto w = check(c, d, j, m_check, cfg.log_tol)) return w;
  return std::nullopt;
}

std::string to_string(OrthoSummary s) {
  switch (s) {
    case OrthoSummary::Orthogonal: return "Orthogonal";
    case OrthoSummary::NotOrthogonal: return "NotOrthogonal";
    case OrthoSummary::Undecided: return "Undecided";
  }
  return "Undecided";
}

nlohmann::json to_json(const OrthogonalityReport& r) {
  nlohmann::json vs = nlohmann::json::array();
  for (const auto& v : r.verdicts) vs.push_back(to_json(v));
  nlohmann::json j = {{"summary", to_string(r.summary)}, {"verdicts", vs}};
  if (r.witness) j["periodic_witness"] = to_json(*r.witness);
  if (r.kappa_hat) j["kappa_hat"] = *r.kappa_hat;
  return j;
}

OrthogonalityReport orthogonality_report(const WeightSpec& u, const WeightSpec& v, double p, const OrthoConfig& cfg) {
  OrthogonalityReport rep;
  const long H = cfg.horizon;
  Verdict sim = similarity_test(u, v, H, cfg);
  rep.verdicts.push_back(sim);
  rep.verdicts.push_back(window_orthogonality_test(u, v, cfg.n_window, H, cfg));

  Verdict bb = verdict(Rule::BoundedBelowDissimilar, H);
  double lu = lower_bound_modulus(u), lv = lower_bound_modulus(v);
  bb.evidence = {{"claim", "orthogonal"}, {"inf_abs_u", lu}, {"inf_abs_v", lv}, {"similarity", to_string(sim.status)}};
  if (lu > 0 && lv > 0 && sim.refuted()) bb.status = Status::Established;
  rep.verdicts.push_back(bb);

  const auto* su = std::get_if<WeightSpec::Scaled>(&u.kind());
  const auto* sv = std::get_if<WeightSpec::Scaled>(&v.kind());
  if (su && sv && structurally_equal(*su->base, *sv->base))
    rep.verdicts.push_back(scalar_pair_test("shared base", su->a, sv->a));

  Verdict per = verdict(Rule::SharedPeriodicPoint, H);
  per.evidence = {{"claim", "shared non-zero periodic point"}, {"d_max", cfg.d_max}, {"m_check", cfg.m_check}};
  try {
    rep.witness = shared_periodic_point(u, v, p, cfg.d_max, cfg.m_check, H, cfg);
    per.evidence["found"] = rep.witness.has_value();
    if (rep.witness) {
      per.status = Status::Established;
      per.evidence["witness"] = to_json(*rep.witness);
    }
  } catch (const NotSummable& e) {
    per.evidence["skipped"] = e.what();
  }
  rep.verdicts.push_back(per);

  Verdict ge = verdict(Rule::GaussianEquivalence, H);
  try {
    GaussianEquivalence g = gaussian_equivalence_test(u, v, p, H, WeightsConfig{}.series);
    ge = g.exists_kappa;
    rep.kappa_hat = g.kappa_hat;
  } catch (const NotSummable& e) {
    ge.evidence = {{"skipped", e.what()}};
  }
  rep.verdicts.push_back(ge);

  std::vector<std::string> orth, not_orth;
  for (const auto& v : rep.verdicts) {
    switch (v.rule) {
      case Rule::WindowedRatio:
      case Rule::BoundedBelowDissimilar:
        if (v.established()) orth.push_back(to_string(v.rule));
        break;
      case Rule::ScalarPair:
        if (v.established()) orth.push_back(to_string(v.rule));
        if (v.refuted()) not_orth.push_back(to_string(v.rule));
        break;
      case Rule::SharedPeriodicPoint:
      case Rule::GaussianEquivalence:
        if (v.established()) not_orth.push_back(to_string(v.rule));
        break;
      default: break;
    }
  }
  if (!orth.empty() && !not_orth.empty()) {
    std::string msg = "orthogonal by";
    for (const auto& s : orth) msg += " " + s;
    msg += " but not orthogonal by";
    for (const auto& s : not_orth) msg += " " + s;
    throw InternalInconsistency(msg);
  }
  if (!orth.empty())
    rep.summary = OrthoSummary::Orthogonal;
  else if (!not_orth.empty())
    rep.summary = OrthoSummary::NotOrthogonal;
  return rep;
}

}  // namespace shiftlab
