#include "shiftlab/hellinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "shiftlab/errors.hpp"
#include "shiftlab/json_io.hpp"
#include "shiftlab/parallel.hpp"
#include "shiftlab/ratio.hpp"

namespace shiftlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_cosh(double x) {
  x = std::abs(x);
  if (x < 0.1) {
    double x2 = x * x;
    return x2 * (0.5 + x2 * (-1.0 / 12 + x2 * (1.0 / 45 - x2 * 17.0 / 2520)));
  }
  return x + std::log1p(std::exp(-2 * x)) - std::log(2.0);
}

bool same_point(std::complex<double> a, std::complex<double> b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

const Gaussian* as_gaussian(const MarginalMeasure& m) { return std::get_if<Gaussian>(&m.kind()); }

double overlap_quadrature(const MarginalMeasure& a, const MarginalMeasure& b, const HellingerConfig& cfg) {
  const Gaussian* ga = as_gaussian(a);
  const Gaussian* gb = as_gaussian(b);
  if (ga && gb && ga->d == 2) {
    // rotation-invariant laws: integrate over circles
    auto f = [&](double r) {
      if (r == 0.0) return 0.0;
      double l = 0.5 * (a.log_density({r, 0.0}) + b.log_density({r, 0.0}));
      return 2 * kPi * r * std::exp(l);
    };
    double scale = std::sqrt(ga->sigma * gb->sigma);
    return integrate(f, 0.0, kInf, {scale, 4 * scale}, cfg.quad).value;
  }
  auto [la, ha] = a.support();
  auto [lb, hb] = b.support();
  double lo = std::max(la, lb), hi = std::min(ha, hb);
  if (!(lo < hi)) return 0.0;
  std::vector<double> bp = a.breakpoints();
  auto bpb = b.breakpoints();
  bp.insert(bp.end(), bpb.begin(), bpb.end());
  for (const Gaussian* g : {ga, gb})
    if (g)
      for (double k : {-8.0, -2.0, 2.0, 8.0}) bp.push_back(k * g->sigma);
  auto f = [&](double t) {
    double l = 0.5 * (a.log_density({t, 0.0}) + b.log_density({t, 0.0}));
    return std::exp(l);
  };
  return integrate(f, lo, hi, bp, cfg.quad).value;
}

}  // namespace

double gaussian_hellinger(double sigma, double sigma2, int d) {
  if (!(sigma > 0) || !(sigma2 > 0)) throw PreconditionError("Gaussian scales must be positive");
  return std::exp(-0.5 * d * log_cosh(std::log(sigma2) - std::log(sigma)));
}

double gaussian_deficit(double log_lambda, int d) { return -std::expm1(-0.5 * d * log_cosh(log_lambda)); }

double hellinger_quadrature(const MarginalMeasure& a, const MarginalMeasure& b, const HellingerConfig& cfg) {
  if (a.is_discrete() || b.is_discrete()) throw NoDensity("quadrature needs densities on both sides");
  if (a.field_dim() != b.field_dim()) throw PreconditionError("laws live on different fields");
  return std::clamp(overlap_quadrature(a, b, cfg), 0.0, 1.0);
}

double hellinger(const MarginalMeasure& a, const MarginalMeasure& b, const HellingerConfig& cfg) {
  const Gaussian* ga = as_gaussian(a);
  const Gaussian* gb = as_gaussian(b);
  if (ga && gb) {
    if (ga->d != gb->d) throw PreconditionError("laws live on different fields");
    return gaussian_hellinger(ga->sigma, gb->sigma, ga->d);
  }
  const auto* da = std::get_if<DiscreteGroup>(&a.kind());
  const auto* db = std::get_if<DiscreteGroup>(&b.kind());
  if (da && db) {
    double s = 0.0;
    for (size_t i = 0; i < da->support.size(); ++i)
      for (size_t j = 0; j < db->support.size(); ++j)
        if (same_point(da->support[i], db->support[j], cfg.atom_tol)) s += std::sqrt(da->weights[i] * db->weights[j]);
    return std::clamp(s, 0.0, 1.0);
  }
  if (da || db) return 0.0;
  return hellinger_quadrature(a, b, cfg);
}

double hellinger(const MixedMeasure& a, const MixedMeasure& b, const HellingerConfig& cfg) {
  double s = 0.0;
  for (const auto& [x, p] : a.atoms)
    for (const auto& [y, q] : b.atoms)
      if (same_point(x, y, cfg.atom_tol)) s += std::sqrt(p * q);
  if (a.continuous && b.continuous && a.continuous_mass > 0 && b.continuous_mass > 0)
    s += std::sqrt(a.continuous_mass * b.continuous_mass) * hellinger(*a.continuous, *b.continuous, cfg);
  return std::clamp(s, 0.0, 1.0);
}

bool mutually_continuous(const MarginalMeasure& a, const MarginalMeasure& b, double tol) {
  if (a.field_dim() != b.field_dim()) return false;
  if (as_gaussian(a) && as_gaussian(b)) return true;
  const auto* da = std::get_if<DiscreteGroup>(&a.kind());
  const auto* db = std::get_if<DiscreteGroup>(&b.kind());
  if (da || db) {
    if (!da || !db) return false;
    auto covered = [tol](const DiscreteGroup& x, const DiscreteGroup& y) {
      for (auto s : x.support) {
        bool hit = false;
        for (auto t : y.support) hit = hit || same_point(s, t, tol);
        if (!hit) return false;
      }
      return true;
    };
    return covered(*da, *db) && covered(*db, *da);
  }
  if (as_gaussian(a) || as_gaussian(b)) return false;
  // uniform and grid laws: equal supports, densities positive inside
  auto [la, ha] = a.support();
  auto [lb, hb] = b.support();
  auto close = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)}); };
  if (!close(la, lb) || !close(ha, hb)) return false;
  for (const MarginalMeasure* m : {&a, &b})
    if (const auto* g = std::get_if<GridDensity>(&m->kind()))
      for (long i = 0; i < g->cells(); ++i)
        if (g->right_at(i) <= 0 && g->left_at(i + 1) <= 0) return false;
  return true;
}

std::string to_string(KakutaniVerdict v) {
  switch (v) {
    case KakutaniVerdict::Equivalent: return "Equivalent";
    case KakutaniVerdict::Orthogonal: return "Orthogonal";
    case KakutaniVerdict::NonOrthogonal: return "NonOrthogonal";
    case KakutaniVerdict::Undecided: return "Undecided";
  }
  return "Undecided";
}

nlohmann::json to_json(const HellingerReport& r, bool with_per_n) {
  nlohmann::json j = {{"verdict", to_string(r.verdict)},
                      {"deficit_sum", r.deficit_sum},
                      {"rule", r.rule},
                      {"horizon", r.horizon},
                      {"series", to_string(r.certificate.status)},
                      {"series_rule", r.certificate.rule},
                      {"evidence", r.evidence}};
  if (r.kappa_hat) j["kappa_hat"] = *r.kappa_hat;
  if (r.certificate.tail_bound >= 0) j["tail_bound"] = r.certificate.tail_bound;
  if (with_per_n) j["per_n"] = r.per_n;
  return j;
}

HellingerReport kakutani_decide(const InvariantProductMeasure& mu, const InvariantProductMeasure& mv, long horizon,
                                const KakutaniConfig& cfg) {
  if (horizon < 1) throw PreconditionError("horizon must be >= 1");
  HellingerReport out;
  out.horizon = horizon;
  LogProductSeries lu = LogProductSeries::compute(mu.spec, horizon);
  LogProductSeries lv = LogProductSeries::compute(mv.spec, horizon);

  std::vector<double> deficits(horizon + 1);
  std::vector<double> per_n(horizon + 1);
  bool all_equivalent = true;
  bool singular_pair = false;
  const Gaussian* gu = as_gaussian(mu.mu0);
  const Gaussian* gv = as_gaussian(mv.mu0);
  if (gu && gv) {
    if (gu->d != gv->d) throw PreconditionError("laws live on different fields");
    const int d = gu->d;
    const DD scale{std::log(gv->sigma), 0.0};
    const DD base = scale - DD{std::log(gu->sigma), 0.0};
    for (long n = 0; n <= horizon; ++n) {
      double x = (base + (lu.log_dd(n) - lv.log_dd(n))).value();
      deficits[n] = gaussian_deficit(x, d);
      per_n[n] = 1.0 - deficits[n];
    }
    out.rule = "gaussian closed form in lambda_n";
    out.kappa_hat = gv->sigma / gu->sigma;
  } else {
    // H_n depends only on the relative scaling of the two marginals.
    std::map<std::pair<double, double>, std::pair<double, bool>> cache;
    for (long n = 0; n <= horizon; ++n) {
      double rel = (lu.log_dd(n) - lv.log_dd(n)).value();
      double ph = wrap_phase(lu.phase(n) - lv.phase(n));
      auto key = std::make_pair(rel, ph);
      auto it = cache.find(key);
      if (it == cache.end()) {
        MarginalMeasure b = mv.mu0.scaled(rel, ph);
        double h = hellinger(mu.mu0, b, cfg.hellinger);
        it = cache.emplace(key, std::make_pair(h, mutually_continuous(mu.mu0, b))).first;
      }
      per_n[n] = it->second.first;
      deficits[n] = 1.0 - per_n[n];
      all_equivalent = all_equivalent && it->second.second;
      singular_pair = singular_pair || per_n[n] == 0.0;
    }
    out.rule = "per-marginal Hellinger integrals";
    out.evidence["distinct_scalings"] = cache.size();
  }

  out.deficit_sum = compensated_sum(deficits);
  out.certificate = certify_series(std::span<const double>(deficits).subspan(1), 1, cfg.series);
  out.certificate.partial_sum += deficits[0];

  // Symbolic shapes of lambda_n settle what a finite window cannot.
  RatioForm rf = ratio_form(mu.spec, mv.spec);
  out.evidence["ratio_form"] = to_string(rf.kind);
  using RK = RatioForm::Kind;
  if (rf.kind == RK::Drift || rf.kind == RK::Oscillating || rf.kind == RK::BoundedOscillating) {
    out.certificate.status = SeriesStatus::Diverges;
    out.certificate.rule = "deficits do not vanish along a subsequence";
    out.certificate.tail_bound = -1.0;
  } else if (rf.kind == RK::EventuallyConstant && rf.from <= horizon) {
    const double d = deficits[std::max<long>(rf.from, 1)];
    out.certificate.status = d <= 1e-24 ? SeriesStatus::Converges : SeriesStatus::Diverges;
    out.certificate.rule = d <= 1e-24 ? "marginals eventually identical" : "eventually constant positive deficit";
    out.certificate.tail_bound = d <= 1e-24 ? 0.0 : -1.0;
  }
  if (singular_pair) {
    out.verdict = KakutaniVerdict::Orthogonal;
    out.rule += "; a marginal pair is mutually singular";
  } else if (out.certificate.status == SeriesStatus::Diverges) {
    out.verdict = KakutaniVerdict::Orthogonal;
  } else if (out.certificate.status == SeriesStatus::Converges) {
    out.verdict = all_equivalent ? KakutaniVerdict::Equivalent : KakutaniVerdict::NonOrthogonal;
  }
  double log_prod = 0.0;
  for (double h : per_n) log_prod += h > 0 ? std::log(h) : -kInf;
  out.evidence["log_hellinger_product"] = log_prod;
  out.evidence["marginals_equivalent"] = all_equivalent;
  if (cfg.keep_per_n) out.per_n = std::move(per_n);
  return out;
}

GaussianEquivalence gaussian_equivalence_test(const WeightSpec& u, const WeightSpec& v, double p, long horizon,
                                              const SeriesConfig& cfg) {
  WeightsConfig wc;
  wc.series = cfg;
  LogProductSeries lu = LogProductSeries::compute(u, horizon);
  LogProductSeries lv = LogProductSeries::compute(v, horizon);
  for (const auto* s : {&lu, &lv}) {
    SummabilityVerdict sv = summability(*s, p, wc);
    if (sv.status != SeriesStatus::Converges)
      throw NotSummable("invariant Gaussian product measure needs summable inverse products");
  }
  GaussianEquivalence out;
  Verdict& verdict = out.exists_kappa;
  verdict.rule = Rule::GaussianEquivalence;
  verdict.horizon = horizon;
  RatioLimit rl = ratio_limit(lu, lv);
  verdict.evidence = {{"ratio_limit", rl.rule}, {"ratio_evidence", rl.evidence}};
  if (rl.status == Status::Refuted) {
    verdict.status = Status::Refuted;
    verdict.evidence["reason"] = "|lambda_n| has no limit in (0, infinity); deficit terms do not vanish";
    return out;
  }
  if (rl.status == Status::Undecided) return out;

  const double kappa = std::exp(-rl.log_limit);
  out.kappa_hat = kappa;
  std::vector<double> terms(horizon);
  double acc = 0.0;
  out.deficit_partial_sums.resize(horizon);
  for (long n = 1; n <= horizon; ++n) {
    double x = (lu.log_dd(n) - lv.log_dd(n)).value() - rl.log_limit;
    double t = std::expm1(x);
    terms[n - 1] = t * t;
    acc += terms[n - 1];
    out.deficit_partial_sums[n - 1] = acc;
  }
  out.deficit = certify_series(terms, 1, cfg);

  RatioForm rf = ratio_form(u, v);
  bool symbolic = false;
  if (rf.kind == RatioForm::Kind::EventuallyConstant) {
    symbolic = true;
    verdict.evidence["reason"] = "lambda_n eventually constant";
  } else if (rf.kind == RatioForm::Kind::Convergent && (!rf.eps_u || rf.eps_u->square_summable()) &&
             (!rf.eps_v || rf.eps_v->square_summable())) {
    symbolic = true;
    verdict.evidence["reason"] = "1 - kappa lambda_n is dominated by square-summable corrections";
  }
  verdict.evidence["kappa_hat"] = kappa;
  verdict.evidence["deficit_partial_sum"] = out.deficit.partial_sum;
  verdict.evidence["deficit_series"] = to_string(out.deficit.status);
  verdict.evidence["deficit_rule"] = out.deficit.rule;
  if (symbolic || out.deficit.status == SeriesStatus::Converges) {
    verdict.status = Status::Established;
    out.witnesses.emplace(InvariantProductMeasure{MarginalMeasure::gaussian(1.0, field_dim(u.field())), u, p},
                          InvariantProductMeasure{MarginalMeasure::gaussian(kappa, field_dim(u.field())), v, p});
  } else if (out.deficit.status == SeriesStatus::Diverges) {
    verdict.status = Status::Refuted;
  }
  return out;
}

DiscreteMarginalResult discrete_marginal_test(const WeightSpec& u, const WeightSpec& v, const MarginalMeasure& mu0_u,
                                              const MarginalMeasure& mu0_v, long horizon) {
  const auto* du = std::get_if<DiscreteGroup>(&mu0_u.kind());
  if (!du || !mu0_v.is_discrete()) throw PreconditionError("discrete marginals required");
  DiscreteMarginalResult out;
  Verdict& verdict = out.verdict;
  verdict.rule = Rule::DiscreteMarginals;
  verdict.horizon = horizon;
  RatioForm rf = ratio_form(u, v);
  verdict.evidence = {{"ratio_form", to_string(rf.kind)}, {"reason", rf.reason}};
  if (rf.kind == RatioForm::Kind::Unknown) return out;
  if (rf.kind != RatioForm::Kind::EventuallyConstant) {
    verdict.status = Status::Refuted;
    verdict.evidence["claim"] = "orthogonal with respect to discrete product measures";
    return out;
  }
  const long m = std::max(horizon, rf.from + 1);
  LogProductSeries lu = LogProductSeries::compute(u, m);
  LogProductSeries lv = LogProductSeries::compute(v, m);
  // The modulus is eventually constant; the phase must settle too.
  double ph = wrap_phase(lu.phase(m) - lv.phase(m));
  for (long n = std::max(rf.from, 1L); n <= m; ++n) {
    if (std::abs(wrap_phase(lu.phase(n) - lv.phase(n)) - ph) > 1e-12) {
      verdict.evidence["reason"] = "phase of lambda_n does not settle";
      return out;
    }
  }
  double log_lambda = (lu.log_dd(m) - lv.log_dd(m)).value();
  verdict.status = Status::Established;
  verdict.evidence["claim"] = "equivalent discrete product measures exist";
  verdict.evidence["log_abs_lambda"] = log_lambda;
  verdict.evidence["arg_lambda"] = ph;
  // q(s) = p(lambda s): the support of mu0_v is supp(mu0_u) / lambda
  out.constructed_mu0_v = mu0_u.scaled(-log_lambda, -ph);
  verdict.evidence["constructed_mu0_v"] = to_json(*out.constructed_mu0_v);
  verdict.evidence["supplied_mu0_v_matches"] =
      std::abs(hellinger(*out.constructed_mu0_v, mu0_v) - 1.0) < 1e-12;
  return out;
}

Verdict translate_test(const std::function<double(long)>& alphas, bool has_second_moment, long horizon,
                       const SeriesConfig& cfg) {
  if (horizon < 2) throw PreconditionError("horizon must be >= 2");
  Verdict v;
  v.rule = Rule::TranslateCriterion;
  v.horizon = horizon;
  std::vector<double> terms;
  std::string statistic;
  if (has_second_moment) {
    statistic = "sum alpha_n^2";
    terms.reserve(horizon);
    for (long n = 1; n <= horizon; ++n) terms.push_back(alphas(n) * alphas(n));
  } else {
    // Divergence of sum (alpha_2n - alpha_n)^2 rules out every limit alpha.
    statistic = "sum (alpha_2n - alpha_n)^2";
    for (long n = 1; 2 * n <= horizon; ++n) {
      double d = alphas(2 * n) - alphas(n);
      terms.push_back(d * d);
    }
    long start = horizon - horizon / 4;
    double s = 0.0;
    for (long n = start; n <= horizon; ++n) s += alphas(n);
    v.evidence["alpha_hat"] = s / static_cast<double>(horizon - start + 1);
  }
  SeriesCertificate cert = certify_series(terms, 1, cfg);
  double a0 = alphas(0);
  v.evidence["statistic"] = statistic;
  v.evidence["partial_sum"] = cert.partial_sum + (has_second_moment ? a0 * a0 : 0.0);
  v.evidence["series"] = to_string(cert.status);
  v.evidence["series_rule"] = cert.rule;
  if (cert.status == SeriesStatus::Diverges) {
    v.status = Status::Established;
    v.evidence["claim"] = "orthogonal: a necessary condition for non-orthogonality fails";
  } else {
    v.evidence["claim"] = cert.status == SeriesStatus::Converges ? "necessary condition holds; not conclusive"
                                                                  : "series undecided";
  }
  return v;
}

nlohmann::json to_json(const KakutaniWitness& w) {
  return {{"N", w.N},
          {"log_hellinger_product", w.log_hellinger_product},
          {"E", w.E_descriptor},
          {"est_mu_v_of_E", w.est_mu_v_of_E},
          {"se_mu_v", w.se_mu_v},
          {"est_mu_u_of_complement", w.est_mu_u_of_complement},
          {"se_mu_u", w.se_mu_u},
          {"certified", w.certified}};
}

KakutaniWitness kakutani_witness(const InvariantProductMeasure& mu, const InvariantProductMeasure& mv, long N,
                                 double epsilon, long mc_samples, std::uint64_t seed, long max_auto_n,
                                 const HellingerConfig& cfg) {
  if (mu.mu0.is_discrete() || mv.mu0.is_discrete()) throw NoDensity("likelihood ratio needs densities");
  if (!(epsilon > 0 && epsilon < 1)) throw PreconditionError("epsilon must lie in (0, 1)");
  if (mc_samples < 1) throw PreconditionError("need at least one sample");
  const long search = N > 0 ? N : max_auto_n;
  LogProductSeries lu = LogProductSeries::compute(mu.spec, search);
  LogProductSeries lv = LogProductSeries::compute(mv.spec, search);

  KakutaniWitness w;
  double log_prod = 0.0;
  long chosen = -1;
  for (long n = 0; n <= search; ++n) {
    double rel = (lu.log_dd(n) - lv.log_dd(n)).value();
    double h = hellinger(mu.mu0, mv.mu0.scaled(rel, wrap_phase(lu.phase(n) - lv.phase(n))), cfg);
    log_prod += h > 0 ? std::log(h) : -kInf;
    if (N <= 0 && log_prod < std::log(epsilon)) {
      chosen = n;
      break;
    }
  }
  if (N > 0) {
    if (!(log_prod < std::log(epsilon)))
      throw InsufficientHorizon("product of Hellinger integrals up to N is " + std::to_string(std::exp(log_prod)));
    chosen = N;
  }
  if (chosen < 0) throw InsufficientHorizon("product of Hellinger integrals stays above epsilon up to " + std::to_string(search));
  w.N = chosen;
  w.log_hellinger_product = log_prod;

  // log F_N = 1/2 sum_n [log p_{u,n}(x_n) - log p_{v,n}(x_n)], p_{w,n}(t) = |W_n|^d p_0(W_n t)
  const int d = mu.mu0.field_dim();
  auto log_f = [&](const LogVector& x) {
    double s = 0.0;
    for (long n = 0; n <= chosen; ++n) {
      const LogCoord& c = x[n];
      auto at = [&](const LogProductSeries& l, const MarginalMeasure& m0) {
        LogCoord y;
        y.log_abs = c.log_abs + l.log_dd(n);
        y.phase = wrap_phase(c.phase + l.phase(n));
        return d * l.log(n) + m0.log_density(y.value());
      };
      double a = at(lu, mu.mu0), b = at(lv, mv.mu0);
      if (a == -kInf) return -kInf;
      if (b == -kInf) return kInf;
      s += 0.5 * (a - b);
    }
    return s;
  };
  ProductSampler su(mu, chosen), sv(mv, chosen);
  std::vector<char> hit_v(mc_samples), miss_u(mc_samples);
  parallel_for(mc_samples, [&](std::size_t i) {
    hit_v[i] = log_f(sv.draw_log(seed, 2 * i + 1)) >= 0.0;
    miss_u[i] = log_f(su.draw_log(seed, 2 * i)) < 0.0;
  });
  const double M = static_cast<double>(mc_samples);
  w.est_mu_v_of_E = std::count(hit_v.begin(), hit_v.end(), 1) / M;
  w.est_mu_u_of_complement = std::count(miss_u.begin(), miss_u.end(), 1) / M;
  w.se_mu_v = std::sqrt(w.est_mu_v_of_E * (1 - w.est_mu_v_of_E) / M);
  w.se_mu_u = std::sqrt(w.est_mu_u_of_complement * (1 - w.est_mu_u_of_complement) / M);
  w.certified = w.est_mu_v_of_E < epsilon + 3 * w.se_mu_v && w.est_mu_u_of_complement < epsilon + 3 * w.se_mu_u;
  w.E_descriptor = {{"set", "F_N >= 1"},
                    {"F_N", "prod_{n<=N} sqrt(d mu_u,n / d mu_v,n)(x_n)"},
                    {"N", chosen},
                    {"mu_u0", to_json(mu.mu0)},
                    {"mu_v0", to_json(mv.mu0)}};
  return w;
}

}  // namespace shiftlab
