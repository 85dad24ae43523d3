#include "shiftlab/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shiftlab/errors.hpp"
#include "shiftlab/parallel.hpp"
#include "shiftlab/ratio.hpp"

namespace shiftlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr long kDirectProductMax = 64;

LogProductSeries series_for(const WeightSpec& spec, std::size_t len) {
  return LogProductSeries::compute(spec, std::max<long>(static_cast<long>(len) - 1, 0));
}

}  // namespace

LogVector shift_power(const WeightSpec& spec, const LogVector& x, long n) {
  if (n < 0) throw PreconditionError("shift power must be >= 0");
  if (n == 0) return x;
  if (n >= static_cast<long>(x.size())) return {};
  return apply_shift_power(series_for(spec, x.size()), x, n);
}

std::vector<std::complex<double>> shift_power(const WeightSpec& spec, const std::vector<std::complex<double>>& x,
                                              long n) {
  if (n < 0) throw PreconditionError("shift power must be >= 0");
  if (n == 0) return x;
  const long len = static_cast<long>(x.size());
  if (n >= len) return {};
  std::vector<std::complex<double>> out(len - n);
  if (n <= kDirectProductMax) {
    // short powers: multiply the weights themselves, exact for dyadic values
    std::vector<std::complex<double>> w(len);
    for (long k = 1; k < len; ++k) w[k] = eval_weight(spec, k).value;
    bool finite = true;
    for (long j = 0; j + n < len && finite; ++j) {
      std::complex<double> prod = x[j + n];
      for (long k = j + 1; k <= j + n; ++k) prod *= w[k];
      finite = std::isfinite(prod.real()) && std::isfinite(prod.imag());
      out[j] = prod;
    }
    if (finite) return out;
  }
  const LogProductSeries s = series_for(spec, x.size());
  for (long j = 0; j + n < len; ++j) {
    const double c = exp_dd(s.log_dd(j + n) - s.log_dd(j));
    const double ph = wrap_phase(s.phase(j + n) - s.phase(j));
    if (ph == 0.0)
      out[j] = x[j + n] * c;
    else if (ph == kPi)
      out[j] = x[j + n] * -c;
    else
      out[j] = x[j + n] * std::polar(c, ph);
  }
  return out;
}

Region Region::ball(std::vector<std::complex<double>> center, double radius, std::string label) {
  if (!(radius > 0.0)) throw PreconditionError("ball radius must be positive");
  Region r;
  r.kind = Kind::Ball;
  r.center = std::move(center);
  r.radius = radius;
  r.label = std::move(label);
  return r;
}

Region Region::half_space(double gamma, std::string label) {
  if (!(gamma > 0.0)) throw PreconditionError("half-space level must be positive");
  Region r;
  r.kind = Kind::HalfSpace;
  r.gamma = gamma;
  r.label = std::move(label);
  return r;
}

Region Region::kernel(double M, double gamma, std::string label) {
  if (!(M > 0.0) || !(gamma > 0.0)) throw PreconditionError("kernel region needs M > 0 and gamma > 0");
  Region r;
  r.kind = Kind::Kernel;
  r.M = M;
  r.gamma = gamma;
  r.label = std::move(label);
  return r;
}

bool Region::excludes_zero(double p) const {
  switch (kind) {
    case Kind::Ball: {
      double s = 0.0;
      for (auto z : center) s += std::pow(std::abs(z), p);
      return std::pow(s, 1.0 / p) > radius;
    }
    case Kind::HalfSpace:
    case Kind::Kernel:
      return gamma > 0.0;
  }
  return false;
}

Orbit::Orbit(const LogProductSeries& s, const LogVector& x) : len_(static_cast<long>(x.size())) {
  if (s.horizon() < len_ - 1) throw PreconditionError("log product series shorter than the vector");
  anchored_.resize(len_);
  anchored_phase_.resize(len_);
  logs_.resize(len_);
  phases_.resize(len_);
  real_ = !s.has_phases();
  for (long k = 0; k < len_; ++k) {
    logs_[k] = s.log(k);
    phases_[k] = s.phase(k);
    if (x[k].is_zero()) {
      anchored_[k] = -kInf;
      continue;
    }
    anchored_[k] = (x[k].log_abs + s.log_dd(k)).value();
    anchored_phase_[k] = wrap_phase(x[k].phase + phases_[k]);
    if (x[k].phase != 0.0 && x[k].phase != kPi) real_ = false;
  }
}

std::complex<double> Orbit::coord(long n, long j) const {
  const long k = j + n;
  if (j < 0 || k >= len_ || anchored_[k] == -kInf) return {0.0, 0.0};
  double m = std::exp(anchored_[k] - logs_[j]);
  double ph = wrap_phase(anchored_phase_[k] - phases_[j]);
  if (real_) return {ph == 0.0 ? m : -m, 0.0};
  return std::polar(m, ph);
}

double Orbit::log_norm(long n, double p) const {
  double top = -kInf;
  for (long j = 0; j < size(n); ++j) top = std::max(top, anchored_[j + n] - logs_[j]);
  if (top == -kInf) return top;
  double acc = 0.0;
  for (long j = 0; j < size(n); ++j) acc += std::exp(p * (anchored_[j + n] - logs_[j] - top));
  return top + std::log(acc) / p;
}

namespace {

double pow_abs(std::complex<double> z, double p) { return p == 2.0 ? std::norm(z) : std::pow(std::abs(z), p); }

}  // namespace

bool Orbit::in(long n, const Region& r, double p, double tail_bound) const {
  switch (r.kind) {
    case Region::Kind::HalfSpace:
      return coord0_abs(n) > r.gamma;
    case Region::Kind::Kernel: {
      if (coord0_abs(n) < r.gamma) return false;
      double budget = r.M - tail_bound;
      if (budget < 0.0) return false;
      double cap = std::pow(budget, p), acc = 0.0;
      for (long j = 0; j < size(n); ++j) {
        acc += pow_abs(coord(n, j), p);
        if (!(acc <= cap)) return false;
      }
      return true;
    }
    case Region::Kind::Ball: {
      double budget = r.radius - tail_bound;
      if (budget <= 0.0) return false;
      double cap = std::pow(budget, p), acc = 0.0;
      const long len = std::max<long>(size(n), static_cast<long>(r.center.size()));
      for (long j = 0; j < len; ++j) {
        std::complex<double> c = j < static_cast<long>(r.center.size()) ? r.center[j] : 0.0;
        acc += pow_abs(coord(n, j) - c, p);
        if (!(acc < cap)) return false;
      }
      return true;
    }
  }
  return false;
}

std::string OrbitTrace::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "n,log_norm,coord0_abs";
  for (const auto& [label, hits] : visit_sets) os << ",hit_" << label;
  os << "\n";
  std::map<std::string, std::size_t> cursor;
  for (const Entry& e : entries) {
    os << e.n << "," << e.log_norm << "," << e.coord0_abs;
    for (const auto& [label, hits] : visit_sets) {
      std::size_t& c = cursor[label];
      bool hit = c < hits.size() && hits[c] == e.n;
      if (hit) ++c;
      os << "," << (hit ? 1 : 0);
    }
    os << "\n";
  }
  return os.str();
}

OrbitTrace orbit_trace(const WeightSpec& spec, const LogVector& x, const std::vector<Region>& regions, long horizon,
                       double p, double tail_bound) {
  if (horizon < 0) throw PreconditionError("horizon must be >= 0");
  LogProductSeries s = series_for(spec, x.size());
  Orbit orbit(s, x);
  OrbitTrace t;
  t.horizon = horizon;
  for (const Region& r : regions) t.visit_sets[r.label];
  for (long n = 0; n <= horizon; ++n) {
    t.entries.push_back({n, orbit.log_norm(n, p), orbit.coord0_abs(n)});
    for (const Region& r : regions)
      if (orbit.in(n, r, p, tail_bound)) t.visit_sets[r.label].push_back(n);
  }
  return t;
}

VisitDensity visit_density(const WeightSpec& spec, const LogVector& x, const Region& region, long horizon,
                           double p, double tail_bound) {
  if (horizon < 0) throw PreconditionError("horizon must be >= 0");
  if (region.kind == Region::Kind::Ball && !(region.radius > 0.0))
    throw PreconditionError("ball radius must be positive");
  LogProductSeries s = series_for(spec, x.size());
  Orbit orbit(s, x);
  VisitDensity out;
  for (long n = 0; n <= horizon; ++n)
    if (orbit.in(n, region, p, tail_bound)) out.hits.push_back(n);

  const long floor_n = (horizon + 1) / 64;
  for (long N = 1; N - 1 <= horizon; N *= 2)
    if (N - 1 >= floor_n) out.prefixes.push_back(N - 1);
  if (out.prefixes.empty() || out.prefixes.back() != horizon) out.prefixes.push_back(horizon);
  out.lower_density_estimate = kInf;
  out.upper_density_estimate = 0.0;
  for (long N : out.prefixes) {
    auto cnt = std::upper_bound(out.hits.begin(), out.hits.end(), N) - out.hits.begin();
    double d = static_cast<double>(cnt) / static_cast<double>(N + 1);
    out.lower_density_estimate = std::min(out.lower_density_estimate, d);
    out.upper_density_estimate = std::max(out.upper_density_estimate, d);
  }
  return out;
}

nlohmann::json to_json(const EmpiricalWitness& w) {
  return {{"n_star", w.n_star},
          {"est_joint_pullback", w.est_joint_pullback},
          {"se", w.se},
          {"est_joint_pullback_v", w.est_joint_pullback_v},
          {"se_v", w.se_v},
          {"q_curve", w.q_curve}};
}

namespace {

// hits[i][n] for sample i and n = 0..horizon
std::vector<std::vector<char>> joint_hits(const LogProductSeries& su, const LogProductSeries& sv,
                                          const ProductSampler& sampler, const Region& K, long horizon,
                                          long samples, std::uint64_t seed, std::uint64_t parity) {
  std::vector<std::vector<char>> hits(samples);
  const double p = sampler.measure().p;
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    LogVector x = sampler.draw_log(seed, 2 * i + parity);
    Orbit ou(su, x), ov(sv, x);
    auto& row = hits[i];
    row.assign(horizon + 1, 0);
    for (long n = 0; n <= horizon; ++n) row[n] = ou.in(n, K, p) && ov.in(n, K, p);
  });
  return hits;
}

std::pair<double, double> mean_se(const std::vector<std::vector<char>>& hits, long n) {
  double cnt = 0.0;
  for (const auto& row : hits) cnt += row[n];
  const double M = static_cast<double>(hits.size());
  double q = cnt / M;
  return {q, std::sqrt(q * (1.0 - q) / M)};
}

}  // namespace

std::pair<double, double> joint_pullback_estimate(const WeightSpec& u, const WeightSpec& v,
                                                  const InvariantProductMeasure& m, const Region& K, long n,
                                                  long samples, std::uint64_t seed, long window) {
  if (samples < 1) throw PreconditionError("need at least one sample");
  const long N = n + window;
  ProductSampler sampler(m, N);
  LogProductSeries su = LogProductSeries::compute(u, N);
  LogProductSeries sv = LogProductSeries::compute(v, N);
  std::vector<char> hit(samples, 0);
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
    LogVector x = sampler.draw_log(seed, 2 * i);
    hit[i] = Orbit(su, x).in(n, K, m.p) && Orbit(sv, x).in(n, K, m.p);
  });
  double q = 0.0;
  for (char h : hit) q += h;
  q /= static_cast<double>(samples);
  return {q, std::sqrt(q * (1.0 - q) / static_cast<double>(samples))};
}

EmpiricalWitness empirical_orthogonality_witness(const WeightSpec& u, const WeightSpec& v,
                                                 const InvariantProductMeasure& m_u,
                                                 const InvariantProductMeasure& m_v, const Region& K,
                                                 const WitnessConfig& cfg) {
  if (!K.excludes_zero(m_u.p)) throw PreconditionError("witness region must stay away from 0");
  if (cfg.mc_samples < 1 || cfg.horizon < 0) throw PreconditionError("bad witness configuration");
  const long N = cfg.horizon + cfg.window;
  LogProductSeries su = LogProductSeries::compute(u, N);
  LogProductSeries sv = LogProductSeries::compute(v, N);
  auto hu = joint_hits(su, sv, ProductSampler(m_u, N), K, cfg.horizon, cfg.mc_samples, cfg.seed, 0);
  auto hv = joint_hits(su, sv, ProductSampler(m_v, N), K, cfg.horizon, cfg.mc_samples, cfg.seed, 1);
  EmpiricalWitness w;
  for (long n = 0; n <= cfg.horizon; ++n) {
    auto [qu, seu] = mean_se(hu, n);
    auto [qv, sev] = mean_se(hv, n);
    w.q_curve.push_back(qu);
    if (qu + 3 * seu < cfg.epsilon && qv + 3 * sev < cfg.epsilon) {
      w.n_star = n;
      w.est_joint_pullback = qu;
      w.se = seu;
      w.est_joint_pullback_v = qv;
      w.se_v = sev;
      return w;
    }
  }
  throw NoWitnessFound("joint pullback estimate stayed above " + std::to_string(cfg.epsilon) + " up to n = " +
                       std::to_string(cfg.horizon));
}

nlohmann::json to_json(const FhcTransfer& f) {
  nlohmann::json j = {{"K_hat", f.K_hat}, {"log_K_hat", f.log_K_hat}, {"converged", to_json(f.converged)}};
  j["a_hat"] = f.a_hat ? nlohmann::json(*f.a_hat) : nlohmann::json(nullptr);
  return j;
}

FhcTransfer fhc_transfer_constant(const WeightSpec& u, const WeightSpec& v, long horizon) {
  if (horizon < 1) throw PreconditionError("horizon must be >= 1");
  LogProductSeries lu = LogProductSeries::compute(u, horizon);
  LogProductSeries lv = LogProductSeries::compute(v, horizon);
  double max_log = -kInf, min_log = kInf;
  for (long m = 0; m <= horizon; ++m) {
    double l = (lu.log_dd(m) - lv.log_dd(m)).value();
    max_log = std::max(max_log, l);
    min_log = std::min(min_log, l);
  }
  FhcTransfer out;
  out.log_K_hat = max_log - min_log;
  out.K_hat = std::exp(out.log_K_hat);
  RatioLimit rl = ratio_limit(lu, lv);
  Verdict& c = out.converged;
  c.rule = Rule::FhcTransfer;
  c.horizon = horizon;
  c.status = rl.status;
  c.evidence = {{"ratio_limit", rl.rule}, {"ratio_evidence", rl.evidence}, {"log_K_hat", out.log_K_hat}};
  if (rl.status == Status::Established) {
    out.a_hat = std::exp(rl.log_limit);
    c.evidence["a_hat"] = *out.a_hat;
  }
  return out;
}

}  // namespace shiftlab
