#include "shiftlab/autocorr.hpp"

#include <algorithm>
#include <cmath>

#include "shiftlab/errors.hpp"
#include "shiftlab/ratio.hpp"

namespace shiftlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kCut = 1e-16;

// Walks outward from start until the profile stays below kCut.
double scan_tail(const DensityProfile& h, double start, int dir) {
  double step = 1.0;
  double x = start;
  for (int i = 0; i < 64; ++i) {
    double next = x + dir * step;
    if (std::abs(h(next)) < kCut && std::abs(h(next + dir * step)) < kCut) return next;
    x = next;
    step *= 2.0;
  }
  return x;
}

double integrate_over(const std::function<double(double)>& g, double lo, double hi, std::vector<double> bps,
                      const QuadratureConfig& cfg) {
  if (!(lo < hi)) return 0.0;
  std::vector<double> inside;
  for (double b : bps)
    if (b > lo && b < hi) inside.push_back(b);
  std::sort(inside.begin(), inside.end());
  inside.erase(std::unique(inside.begin(), inside.end()), inside.end());
  return integrate(g, lo, hi, inside, cfg).value;
}

}  // namespace

std::string to_string(SmoothClass s) {
  switch (s) {
    case SmoothClass::W12: return "W12";
    case SmoothClass::PiecewiseC1: return "PiecewiseC1";
    case SmoothClass::Unknown: return "Unknown";
  }
  return "Unknown";
}

std::pair<double, double> DensityProfile::effective_support() const {
  if (empty()) return {0.0, 0.0};
  double a = lo, b = hi;
  if (std::isinf(a) || std::isinf(b)) {
    // anchor at the largest sampled value inside the support
    double anchor = std::isfinite(a) ? a : (std::isfinite(b) ? b : 0.0);
    if (std::isinf(a)) a = scan_tail(*this, std::min(anchor, std::isfinite(b) ? b : anchor), -1);
    if (std::isinf(b)) b = scan_tail(*this, std::max(anchor, std::isfinite(lo) ? lo : anchor), +1);
  }
  return {a, b};
}

std::vector<double> DensityProfile::all_breakpoints() const {
  std::vector<double> out = breakpoints;
  for (const Jump& j : jumps) out.push_back(j.at);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double DensityProfile::norm2(const QuadratureConfig& cfg) const {
  auto [a, b] = effective_support();
  return integrate_over([this](double x) { double y = (*this)(x); return y * y; }, a, b, all_breakpoints(), cfg);
}

DensityProfile DensityProfile::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw PreconditionError("gaussian profile needs sigma > 0");
  DensityProfile h;
  double c = std::pow(2 * M_PI * sigma * sigma, -0.25);
  double k = 1.0 / (4 * sigma * sigma);
  h.f = [c, k](double t) { return c * std::exp(-k * t * t); };
  h.smooth_class = SmoothClass::W12;
  h.breakpoints = {-2 * sigma, 0.0, 2 * sigma};
  return h;
}

DensityProfile DensityProfile::uniform(double a, double b) {
  if (!(a < b)) throw PreconditionError("uniform profile needs a < b");
  DensityProfile h;
  double c = 1.0 / std::sqrt(b - a);
  h.f = [c](double) { return c; };
  h.lo = a;
  h.hi = b;
  h.jumps = {{a, 0.0, c}, {b, c, 0.0}};
  h.smooth_class = SmoothClass::PiecewiseC1;
  return h;
}

DensityProfile DensityProfile::from_measure(const MarginalMeasure& m) {
  if (m.is_discrete()) throw NoDensity("discrete law has no density profile");
  if (m.field_dim() != 1) throw UnsupportedKind("density profiles live on the real line");
  if (const auto* g = std::get_if<Gaussian>(&m.kind())) return gaussian(g->sigma);
  if (const auto* u = std::get_if<UniformInterval>(&m.kind())) return uniform(u->a, u->b);
  const auto& grid = std::get<GridDensity>(m.kind());
  DensityProfile h;
  h.f = [grid](double t) { return std::sqrt(std::max(0.0, grid.eval(t))); };
  h.lo = grid.lo;
  h.hi = grid.hi;
  const long K = grid.cells();
  for (long i = 0; i <= K; ++i) {
    double left = i == 0 ? 0.0 : grid.left_at(i);
    double right = i == K ? 0.0 : grid.right_at(i);
    if (left != right) h.jumps.push_back({grid.node(i), std::sqrt(left), std::sqrt(right)});
  }
  h.breakpoints = m.breakpoints();
  h.smooth_class = h.jumps.empty() ? SmoothClass::W12 : SmoothClass::PiecewiseC1;
  return h;
}

double acf(const DensityProfile& h, double alpha, const QuadratureConfig& cfg) {
  if (h.empty()) return 0.0;
  auto [a, b] = h.effective_support();
  double lo = std::max(a, a - alpha), hi = std::min(b, b - alpha);
  std::vector<double> bps;
  for (double x : h.all_breakpoints()) {
    bps.push_back(x);
    bps.push_back(x - alpha);
  }
  return integrate_over([&](double x) { return h(x) * h(x + alpha); }, lo, hi, bps, cfg);
}

double psi(const DensityProfile& f, const DensityProfile& g, double lambda, const QuadratureConfig& cfg) {
  if (!(lambda > 0.0)) throw PreconditionError("scale must be positive");
  if (f.empty() || g.empty()) return 0.0;
  auto [fa, fb] = f.effective_support();
  auto [ga, gb] = g.effective_support();
  double lo = std::max(fa / lambda, ga), hi = std::min(fb / lambda, gb);
  std::vector<double> bps = g.all_breakpoints();
  for (double x : f.all_breakpoints()) bps.push_back(x / lambda);
  double v = integrate_over([&](double t) { return f(lambda * t) * g(t); }, lo, hi, bps, cfg);
  return std::sqrt(lambda) * v;
}

double theta(const DensityProfile& f, double lambda, const QuadratureConfig& cfg) {
  return psi(f, f, lambda, cfg);
}

std::pair<DensityProfile, DensityProfile> log_substitution(const DensityProfile& f) {
  auto build = [&f](int sign) {
    DensityProfile h;
    h.f = [f, sign](double x) {
      double t = std::exp(x);
      double y = f(sign * t);
      return y == 0.0 ? 0.0 : y * std::exp(0.5 * x);
    };
    // support of t -> sign * t restricted to t > 0
    double a = sign > 0 ? f.lo : -f.hi;
    double b = sign > 0 ? f.hi : -f.lo;
    if (!(b > 0.0)) {
      h.lo = 0.0;
      h.hi = 0.0;
    } else {
      h.lo = a > 0.0 ? std::log(a) : -kInf;
      h.hi = std::isinf(b) ? kInf : std::log(b);
    }
    for (const Jump& j : f.jumps) {
      double u = sign * j.at;
      if (!(u > 0.0)) continue;
      double s = std::sqrt(u);
      // on the negative side x increasing means t decreasing
      if (sign > 0)
        h.jumps.push_back({std::log(u), j.left * s, j.right * s});
      else
        h.jumps.push_back({std::log(u), j.right * s, j.left * s});
    }
    std::sort(h.jumps.begin(), h.jumps.end(), [](const Jump& x, const Jump& y) { return x.at < y.at; });
    for (double x : f.breakpoints) {
      double u = sign * x;
      if (u > 0.0) h.breakpoints.push_back(std::log(u));
    }
    h.smooth_class = f.smooth_class;
    return h;
  };
  return {build(+1), build(-1)};
}

Slopes one_sided_slopes(const DensityProfile& h, const QuadratureConfig& cfg) {
  if (h.smooth_class == SmoothClass::Unknown)
    throw NoDiscontinuityList("one-sided slopes need a certified list of discontinuities");
  const double p0 = acf(h, 0.0, cfg);
  auto slope = [&](double sign) {
    auto D = [&](double s) { return (acf(h, sign * s, cfg) - p0) / (sign * s); };
    const double s = 1e-2;
    double d1 = D(s), d2 = D(s / 2), d3 = D(s / 4);
    double r1 = 2 * d2 - d1;
    double r2 = 2 * d3 - d2;
    return (4 * r2 - r1) / 3;
  };
  Slopes out;
  out.right_slope = slope(1.0);
  out.left_slope = slope(-1.0);
  double acc = 0.0;
  for (const Jump& j : h.jumps) acc += (j.right - j.left) * (j.right - j.left);
  out.jump_formula_value = -0.5 * acc;
  return out;
}

Verdict equivalence_regime(const DensityProfile& f, const WeightSpec& u, const WeightSpec& v, double a, long horizon,
                           const SeriesConfig& cfg) {
  if (!(a > 0.0)) throw PreconditionError("scale a must be positive");
  Verdict out;
  out.rule = Rule::DensityScaleRegime;
  out.horizon = horizon;
  if (f.smooth_class == SmoothClass::W12 && !f.jumps.empty())
    throw HypothesisViolation("profile declared W12 but lists jump discontinuities");
  LogProductSeries lu = LogProductSeries::compute(u, horizon);
  LogProductSeries lv = LogProductSeries::compute(v, horizon);
  if (u.field() != Field::Real || v.field() != Field::Real) throw PreconditionError("weights must be real");
  for (long n = 1; n <= horizon; ++n)
    if (lu.phase(n) != 0.0 || lv.phase(n) != 0.0)
      throw PreconditionError("weight products must stay positive (n = " + std::to_string(n) + ")");
  if (f.smooth_class == SmoothClass::Unknown) {
    out.evidence["reason"] = "smoothness class of the profile is not certified";
    return out;
  }
  bool has_jump = false;
  for (const Jump& j : f.jumps)
    if (j.at != 0.0 && j.left != j.right) has_jump = true;
  const bool linear = has_jump;
  const double log_a = std::log(a);

  std::vector<double> terms(horizon);
  std::vector<long> probe;
  for (long n = 1; n <= horizon; ++n) {
    double x = (lu.log_dd(n) - lv.log_dd(n)).value() - log_a;
    double t = std::expm1(x);
    terms[n - 1] = linear ? std::abs(t) : t * t;
    if (std::abs(t) >= 1e-2 && std::abs(t) <= 0.3 && probe.size() < 64) probe.push_back(n);
  }
  SeriesCertificate cert = certify_series(terms, 1, cfg);
  out.evidence["regime"] = linear ? "linear" : "quadratic";
  out.evidence["series"] = to_string(cert.status);
  out.evidence["series_rule"] = cert.rule;
  out.evidence["partial_sum"] = cert.partial_sum;
  out.evidence["smooth_class"] = to_string(f.smooth_class);

  // local model check: 1 - Theta(lambda) against |lambda - 1| or (lambda - 1)^2
  if (!probe.empty()) {
    std::vector<long> picks;
    const std::size_t want = std::min<std::size_t>(6, probe.size());
    for (std::size_t i = 0; i < want; ++i) picks.push_back(probe[i * probe.size() / want]);
    double lo = kInf, hi = 0.0;
    for (long n : picks) {
      double x = (lu.log_dd(n) - lv.log_dd(n)).value() - log_a;
      double t = std::expm1(x);
      double deficit = 1.0 - theta(f, std::exp(x));
      double r = deficit / (linear ? std::abs(t) : t * t);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out.evidence["local_model_ratio"] = {lo, hi};
  }

  if (cert.status == SeriesStatus::Converges) {
    out.status = Status::Established;
    out.evidence["reason"] = "deficit series converges: product measures are not orthogonal";
  } else if (cert.status == SeriesStatus::Diverges) {
    out.status = Status::Refuted;
    out.evidence["reason"] = "deficit series diverges: product measures are orthogonal";
  }
  return out;
}

LimitScale limit_scale_detect(const WeightSpec& u, const WeightSpec& v, const DensityProfile& f,
                              const DensityProfile& g, long horizon) {
  LimitScale out;
  Verdict& vd = out.a_hat;
  vd.rule = Rule::LimitScale;
  vd.horizon = horizon;
  LogProductSeries lu = LogProductSeries::compute(u, horizon);
  LogProductSeries lv = LogProductSeries::compute(v, horizon);
  RatioLimit rl = ratio_limit(lu, lv);
  vd.evidence = {{"ratio_limit", rl.rule}, {"ratio_evidence", rl.evidence}};
  if (rl.status == Status::Refuted) {
    vd.status = Status::Refuted;
    vd.evidence["reason"] = "lambda_n has no limit in (0, infinity)";
    return out;
  }
  if (rl.status == Status::Undecided) return out;
  const double a = std::exp(rl.log_limit);
  out.a = a;
  vd.evidence["a_hat"] = a;

  auto [fa, fb] = f.effective_support();
  auto [ga, gb] = g.effective_support();
  double lo = std::min(fa / a, ga), hi = std::max(fb / a, gb);
  std::vector<double> avoid = g.all_breakpoints();
  for (double x : f.all_breakpoints()) avoid.push_back(x / a);
  const int K = 4000;
  double worst = 0.0;
  for (int i = 0; i <= K; ++i) {
    double t = lo + (hi - lo) * i / K;
    bool near = false;
    for (double b : avoid)
      if (std::abs(t - b) < 1e-9 * (1.0 + std::abs(b))) near = true;
    if (near) continue;
    double q = g(t) * g(t);
    double fp = f(a * t);
    worst = std::max(worst, std::abs(q - a * fp * fp));
  }
  out.density_match = worst;
  vd.evidence["density_residual"] = worst;
  if (worst < 1e-6) {
    vd.status = Status::Established;
    vd.evidence["reason"] = "lambda_n -> a and q(t) = a p(a t) on the grid";
  } else {
    vd.status = Status::Refuted;
    vd.evidence["reason"] = "q differs from a p(a t) at the detected scale";
  }
  return out;
}

}  // namespace shiftlab
