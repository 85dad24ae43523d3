#include "shiftlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "shiftlab/errors.hpp"
#include "shiftlab/parallel.hpp"

namespace shiftlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// integral of |t|^p (alpha + beta t) over [x0, x1] with 0 <= x0 <= x1
double pos_moment_piece(double p, double alpha, double beta, double x0, double x1) {
  return alpha * (std::pow(x1, p + 1) - std::pow(x0, p + 1)) / (p + 1) +
         beta * (std::pow(x1, p + 2) - std::pow(x0, p + 2)) / (p + 2);
}

double moment_piece(double p, double alpha, double beta, double x0, double x1) {
  if (x1 <= x0) return 0.0;
  if (x0 >= 0) return pos_moment_piece(p, alpha, beta, x0, x1);
  if (x1 <= 0) return pos_moment_piece(p, alpha, -beta, -x1, -x0);
  return pos_moment_piece(p, alpha, -beta, 0.0, -x0) + pos_moment_piece(p, alpha, beta, 0.0, x1);
}

// exact integral of a grid density over [u, v]
double grid_integral(const GridDensity& g, double u, double v) {
  u = std::max(u, g.lo);
  v = std::min(v, g.hi);
  if (v <= u) return 0.0;
  const double h = g.step();
  const long K = g.cells();
  double total = 0.0;
  long i0 = std::clamp(static_cast<long>(std::floor((u - g.lo) / h)), 0L, K - 1);
  long i1 = std::clamp(static_cast<long>(std::floor((v - g.lo) / h)), 0L, K - 1);
  for (long i = i0; i <= i1; ++i) {
    double a = std::max(u, g.node(i)), b = std::min(v, g.node(i + 1));
    if (b <= a) continue;
    double fa = g.right_at(i) + (g.left_at(i + 1) - g.right_at(i)) * (a - g.node(i)) / h;
    double fb = g.right_at(i) + (g.left_at(i + 1) - g.right_at(i)) * (b - g.node(i)) / h;
    total += 0.5 * (fa + fb) * (b - a);
  }
  return total;
}

// (left, right) limits of a grid density at t
std::pair<double, double> grid_limits(const GridDensity& g, double t) {
  if (t < g.lo || t > g.hi) return {0.0, 0.0};
  const double h = g.step();
  double pos = (t - g.lo) / h;
  long j = std::lround(pos);
  if (std::abs(pos - static_cast<double>(j)) < 1e-9) return {g.left_at(j), g.right_at(j)};
  double v = g.eval(t);
  return {v, v};
}

bool on_grid(double t, double origin, double step) {
  double pos = (t - origin) / step;
  return std::abs(pos - std::round(pos)) < 1e-9 * std::max(1.0, std::abs(pos));
}

GridDensity even_part(const GridDensity& g, double M, long K) {
  GridDensity out;
  out.lo = -M;
  out.hi = M;
  out.values.resize(K + 1);
  const double h = 2 * M / static_cast<double>(K);
  for (long i = 0; i <= K; ++i) {
    double t = i == K ? M : -M + h * static_cast<double>(i);
    auto [l1, r1] = grid_limits(g, t);
    auto [l2, r2] = grid_limits(g, -t);
    double left = 0.5 * (l1 + r2), right = 0.5 * (r1 + l2);
    if (i == K) {
      out.values[i] = left;
    } else {
      out.values[i] = right;
      if (i > 0 && left != right) out.left_limits.emplace_back(i, left);
    }
  }
  return out;
}

// Smallest uniform grid on [-M, M] with every point on a node.
std::optional<long> fit_symmetric_grid(const std::vector<double>& points, double M, double base_step) {
  for (long m = 1; m <= 64; ++m) {
    double step = base_step / static_cast<double>(m);
    double kd = 2 * M / step;
    long K = std::lround(kd);
    if (K < 1 || K > 2000000 || std::abs(kd - static_cast<double>(K)) > 1e-9 * kd) continue;
    bool ok = true;
    for (double t : points) ok = ok && on_grid(t, -M, 2 * M / static_cast<double>(K));
    if (ok) return K;
  }
  return std::nullopt;
}

}  // namespace

// ------------------------------------------------------------ GridDensity

double GridDensity::left_at(long i) const {
  if (i <= 0) return 0.0;
  auto it = std::lower_bound(left_limits.begin(), left_limits.end(), i,
                             [](const auto& e, long k) { return e.first < k; });
  if (it != left_limits.end() && it->first == i) return it->second;
  return values[i];
}

double GridDensity::right_at(long i) const {
  if (i >= cells() || i < 0) return 0.0;
  return values[i];
}

double GridDensity::eval(double t) const {
  if (t < lo || t > hi) return 0.0;
  const double h = step();
  long i = std::clamp(static_cast<long>(std::floor((t - lo) / h)), 0L, cells() - 1);
  double frac = (t - node(i)) / h;
  return right_at(i) * (1.0 - frac) + left_at(i + 1) * frac;
}

double GridDensity::mass() const {
  double s = 0.0;
  for (long i = 0; i < cells(); ++i) s += 0.5 * (right_at(i) + left_at(i + 1));
  return s * step();
}

GridDensity GridDensity::normalized(double lo, double hi, std::vector<double> values,
                                    std::vector<std::pair<long, double>> left_limits) {
  GridDensity g{lo, hi, std::move(values), std::move(left_limits)};
  std::sort(g.left_limits.begin(), g.left_limits.end());
  double m = g.mass();
  if (!(m > 0)) throw PreconditionError("grid density has zero mass");
  for (double& v : g.values) v /= m;
  for (auto& e : g.left_limits) e.second /= m;
  return g;
}

// -------------------------------------------------------- MarginalMeasure

MarginalMeasure::MarginalMeasure(Kind k) : kind_(std::move(k)) {
  if (auto* g = std::get_if<Gaussian>(&kind_)) {
    if (!(g->sigma > 0) || !std::isfinite(g->sigma)) throw PreconditionError("Gaussian needs sigma > 0");
    if (g->d != 1 && g->d != 2) throw PreconditionError("Gaussian field dimension must be 1 or 2");
  } else if (auto* u = std::get_if<UniformInterval>(&kind_)) {
    if (!(u->a < u->b) || !std::isfinite(u->a) || !std::isfinite(u->b))
      throw PreconditionError("uniform interval needs a < b");
  } else if (auto* d = std::get_if<DiscreteGroup>(&kind_)) {
    if (d->support.empty() || d->support.size() != d->weights.size())
      throw PreconditionError("discrete law needs matching non-empty support and weights");
    double s = 0.0;
    auto cdf = std::make_shared<std::vector<double>>();
    for (size_t i = 0; i < d->support.size(); ++i) {
      if (d->support[i] == std::complex<double>(0.0, 0.0))
        throw SupportContainsZero("discrete support point 0");
      if (!(d->weights[i] > 0)) throw PreconditionError("discrete weights must be positive");
      s += d->weights[i];
      cdf->push_back(s);
    }
    if (std::abs(s - 1.0) > 1e-10) throw PreconditionError("discrete weights must sum to 1");
    cdf_ = cdf;
  } else {
    auto& gd = std::get<GridDensity>(kind_);
    if (gd.values.size() < 2 || !(gd.lo < gd.hi)) throw PreconditionError("grid density needs >= 1 cell and lo < hi");
    for (double v : gd.values)
      if (!(v >= 0) || !std::isfinite(v)) throw PreconditionError("grid density values must be nonnegative");
    std::sort(gd.left_limits.begin(), gd.left_limits.end());
    for (const auto& [i, v] : gd.left_limits)
      if (i < 1 || i > gd.cells() || !(v >= 0)) throw PreconditionError("bad grid discontinuity");
    if (std::abs(gd.mass() - 1.0) > 1e-10) throw PreconditionError("grid density mass must be 1");
    auto cdf = std::make_shared<std::vector<double>>();
    double s = 0.0;
    for (long i = 0; i < gd.cells(); ++i) {
      s += 0.5 * (gd.right_at(i) + gd.left_at(i + 1)) * gd.step();
      cdf->push_back(s);
    }
    cdf_ = cdf;
  }
}

MarginalMeasure MarginalMeasure::discrete(std::vector<std::complex<double>> support,
                                          std::vector<double> weights) {
  return MarginalMeasure(DiscreteGroup{std::move(support), std::move(weights)});
}

int MarginalMeasure::field_dim() const {
  if (auto* g = std::get_if<Gaussian>(&kind_)) return g->d;
  if (auto* d = std::get_if<DiscreteGroup>(&kind_)) {
    for (auto s : d->support)
      if (s.imag() != 0.0) return 2;
  }
  return 1;
}

std::string MarginalMeasure::kind_name() const {
  switch (kind_.index()) {
    case 0: return "gaussian";
    case 1: return "uniform";
    case 2: return "discrete";
    default: return "grid";
  }
}

double MarginalMeasure::density(std::complex<double> t) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gaussian>) {
          double s2 = k.sigma * k.sigma;
          if (k.d == 1) return std::exp(-t.real() * t.real() / (2 * s2)) / (k.sigma * std::sqrt(2 * kPi));
          return std::exp(-std::norm(t) / (2 * s2)) / (2 * kPi * s2);
        } else if constexpr (std::is_same_v<K, UniformInterval>) {
          return (t.real() >= k.a && t.real() <= k.b) ? 1.0 / (k.b - k.a) : 0.0;
        } else if constexpr (std::is_same_v<K, GridDensity>) {
          return k.eval(t.real());
        } else {
          throw NoDensity("discrete law has no Lebesgue density");
        }
      },
      kind_);
}

double MarginalMeasure::log_density(std::complex<double> t) const {
  if (auto* g = std::get_if<Gaussian>(&kind_)) {
    double ls = std::log(g->sigma);
    if (g->d == 1) {
      double z = t.real() / g->sigma;
      return -0.5 * z * z - ls - 0.5 * std::log(2 * kPi);
    }
    double z = std::abs(t) / g->sigma;
    return -0.5 * z * z - 2 * ls - std::log(2 * kPi);
  }
  return std::log(density(t));
}

std::pair<double, double> MarginalMeasure::support() const {
  return std::visit(
      [](const auto& k) -> std::pair<double, double> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gaussian>) {
          return {-kInf, kInf};
        } else if constexpr (std::is_same_v<K, UniformInterval>) {
          return {k.a, k.b};
        } else if constexpr (std::is_same_v<K, GridDensity>) {
          return {k.lo, k.hi};
        } else {
          double lo = kInf, hi = -kInf;
          for (auto s : k.support) {
            lo = std::min(lo, s.real());
            hi = std::max(hi, s.real());
          }
          return {lo, hi};
        }
      },
      kind_);
}

std::vector<double> MarginalMeasure::breakpoints() const {
  std::vector<double> out;
  if (auto* u = std::get_if<UniformInterval>(&kind_)) {
    out = {u->a, u->b};
  } else if (auto* g = std::get_if<GridDensity>(&kind_)) {
    if (g->cells() <= 4096) {
      for (long i = 0; i <= g->cells(); ++i) out.push_back(i == g->cells() ? g->hi : g->node(i));
    } else {
      out = {g->lo, g->hi};
      for (const auto& e : g->left_limits) out.push_back(g->node(e.first));
    }
  } else if (std::holds_alternative<Gaussian>(kind_)) {
    out = {0.0};
  }
  return out;
}

double MarginalMeasure::abs_moment(double p) const {
  double m = std::visit(
      [p](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gaussian>) {
          if (k.d == 1)
            return std::pow(k.sigma, p) * std::pow(2.0, p / 2) * std::tgamma((p + 1) / 2) /
                   std::sqrt(kPi);
          return std::pow(k.sigma, p) * std::pow(2.0, p / 2) * std::tgamma(1 + p / 2);
        } else if constexpr (std::is_same_v<K, UniformInterval>) {
          return moment_piece(p, 1.0, 0.0, k.a, k.b) / (k.b - k.a);
        } else if constexpr (std::is_same_v<K, DiscreteGroup>) {
          double s = 0.0;
          for (size_t i = 0; i < k.support.size(); ++i) s += k.weights[i] * std::pow(std::abs(k.support[i]), p);
          return s;
        } else {
          double s = 0.0;
          const double h = k.step();
          for (long i = 0; i < k.cells(); ++i) {
            double beta = (k.left_at(i + 1) - k.right_at(i)) / h;
            double alpha = k.right_at(i) - beta * k.node(i);
            s += moment_piece(p, alpha, beta, k.node(i), k.node(i + 1));
          }
          return s;
        }
      },
      kind_);
  if (!std::isfinite(m)) throw InfiniteMoment("p-th moment is not finite");
  return m;
}

double MarginalMeasure::tail(double x) const {
  return std::visit(
      [x](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gaussian>) {
          if (k.d == 1) return std::erfc(x / (k.sigma * std::numbers::sqrt2));
          return std::exp(-x * x / (2 * k.sigma * k.sigma));
        } else if constexpr (std::is_same_v<K, UniformInterval>) {
          double inside = std::max(0.0, std::min(k.b, x) - std::max(k.a, -x));
          return 1.0 - inside / (k.b - k.a);
        } else if constexpr (std::is_same_v<K, DiscreteGroup>) {
          double s = 0.0;
          for (size_t i = 0; i < k.support.size(); ++i)
            if (std::abs(k.support[i]) > x) s += k.weights[i];
          return s;
        } else {
          return grid_integral(k, -kInf, -x) + grid_integral(k, x, kInf);
        }
      },
      kind_);
}

double MarginalMeasure::log_tail(double log_x) const {
  if (auto* g = std::get_if<Gaussian>(&kind_)) {
    if (g->d == 2) return -0.5 * std::exp(2 * (log_x - std::log(g->sigma)));
    double y = std::exp(log_x - std::log(g->sigma)) / std::numbers::sqrt2;
    if (y < 25) return std::log(std::erfc(y));
    double y2 = y * y;
    return -y2 - std::log(y * std::sqrt(kPi)) + std::log1p(-0.5 / y2 + 0.75 / (y2 * y2));
  }
  double t = tail(std::exp(log_x));
  return t > 0 ? std::log(t) : kNegInf;
}

double MarginalMeasure::total_mass() const {
  if (auto* d = std::get_if<DiscreteGroup>(&kind_)) {
    double s = 0.0;
    for (double w : d->weights) s += w;
    return s;
  }
  if (auto* g = std::get_if<GridDensity>(&kind_)) return g->mass();
  return 1.0;
}

MarginalMeasure MarginalMeasure::scaled(double log_factor, double phase) const {
  return scaled(DD{log_factor, 0.0}, phase);
}

MarginalMeasure MarginalMeasure::scaled(const DD& log_factor, double phase) const {
  const double c = exp_dd(log_factor);
  phase = wrap_phase(phase);
  const bool flip = phase == kPi;
  const bool real_factor = phase == 0.0 || flip;
  return std::visit(
      [&](const auto& k) -> MarginalMeasure {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gaussian>) {
          return MarginalMeasure(Gaussian{k.sigma * c, k.d});
        } else if constexpr (std::is_same_v<K, DiscreteGroup>) {
          DiscreteGroup out = k;
          for (auto& s : out.support) {
            if (phase == 0.0)
              s *= c;
            else if (flip)
              s *= -c;
            else
              s *= std::polar(c, phase);
          }
          return MarginalMeasure(std::move(out));
        } else {
          if (!real_factor) throw UnsupportedKind("real-line law under a non-real scaling");
          if constexpr (std::is_same_v<K, UniformInterval>) {
            return flip ? MarginalMeasure(UniformInterval{-k.b * c, -k.a * c})
                        : MarginalMeasure(UniformInterval{k.a * c, k.b * c});
          } else {
            GridDensity g;
            const long Kc = k.cells();
            if (!flip) {
              g = k;
              g.lo = k.lo * c;
              g.hi = k.hi * c;
            } else {
              g.lo = -k.hi * c;
              g.hi = -k.lo * c;
              g.values.resize(Kc + 1);
              for (long i = 0; i < Kc; ++i) g.values[i] = k.left_at(Kc - i);
              g.values[Kc] = k.values[0];
              for (const auto& [j, left] : k.left_limits)
                if (j < Kc) g.left_limits.emplace_back(Kc - j, k.values[j]);
              std::sort(g.left_limits.begin(), g.left_limits.end());
            }
            for (double& v : g.values) v /= c;
            for (auto& e : g.left_limits) e.second /= c;
            return MarginalMeasure(std::move(g));
          }
        }
      },
      kind_);
}

std::complex<double> MarginalMeasure::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::visit(
      [&](const auto& k) -> std::complex<double> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gaussian>) {
          std::normal_distribution<double> nd(0.0, k.sigma);
          if (k.d == 1) return {nd(rng), 0.0};
          double re = nd(rng);
          double im = nd(rng);
          return {re, im};
        } else if constexpr (std::is_same_v<K, UniformInterval>) {
          return {k.a + (k.b - k.a) * unif(rng), 0.0};
        } else if constexpr (std::is_same_v<K, DiscreteGroup>) {
          double u = unif(rng) * cdf_->back();
          size_t i = std::upper_bound(cdf_->begin(), cdf_->end(), u) - cdf_->begin();
          return k.support[std::min(i, k.support.size() - 1)];
        } else {
          double u = unif(rng) * cdf_->back();
          long i = std::upper_bound(cdf_->begin(), cdf_->end(), u) - cdf_->begin();
          i = std::min(i, k.cells() - 1);
          double f0 = k.right_at(i), f1 = k.left_at(i + 1), h = k.step();
          double v = unif(rng);
          double x;
          if (std::abs(f1 - f0) < 1e-12 * std::max(f0, f1))
            x = v * h;
          else
            x = h * (-f0 + std::sqrt(f0 * f0 + (f1 * f1 - f0 * f0) * v)) / (f1 - f0);
          return {k.node(i) + std::clamp(x, 0.0, h), 0.0};
        }
      },
      kind_);
}

// ------------------------------------------------------- product measures

MarginalMeasure marginal_at(const InvariantProductMeasure& m, long n) {
  if (n < 0) throw PreconditionError("marginal index must be >= 0");
  if (n == 0) return m.mu0;
  LogProductSeries s = LogProductSeries::compute(m.spec, n);
  return m.mu0.scaled(-s.log_dd(n), -s.phase(n));
}

MomentIdentity moment_identity(const InvariantProductMeasure& m, long horizon, const WeightsConfig& cfg) {
  const double p = m.p;
  const double mom = m.mu0.abs_moment(p);
  LogProductSeries s = LogProductSeries::compute(m.spec, std::max(horizon, cfg.horizon));
  SummabilityVerdict sv = summability(s, p, cfg);
  if (sv.status != SeriesStatus::Converges)
    throw NotSummable("sum of |w_1...w_n|^-p is " + to_string(sv.status));
  MomentIdentity out;
  std::vector<double> parts;
  parts.reserve(horizon + 1);
  for (long n = 0; n <= horizon; ++n) {
    if (p * s.log(n) < 600.0)
      parts.push_back(m.mu0.scaled(-s.log_dd(n), -s.phase(n)).abs_moment(p));
    else
      parts.push_back(mom * std::exp(-p * s.log(n)));
  }
  out.lhs_truncated = compensated_sum(parts);
  double beyond = 0.0;
  for (long n = horizon + 1; n <= s.horizon(); ++n) beyond += std::exp(-p * s.log(n));
  double sp = sv.partial_sum + sv.tail_bound;
  out.rhs_closed = mom * (1.0 + sp);
  out.tail_bound = mom * (beyond + sv.tail_bound);
  return out;
}

long default_truncation(const WeightSpec& spec, double p, double tol, const WeightsConfig& cfg) {
  LogProductSeries s = LogProductSeries::compute(spec, cfg.horizon);
  SummabilityVerdict sv = summability(s, p, cfg);
  if (sv.status != SeriesStatus::Converges) throw NotSummable("no lp tail bound without summability");
  const double target = std::pow(tol, p);
  double tail = sv.tail_bound;
  long best = s.horizon();
  for (long N = s.horizon(); N >= 0; --N) {
    if (tail < target) best = N;
    else break;
    if (N >= 1) tail += std::exp(-p * s.log(N));
  }
  return best;
}

ProductSampler::ProductSampler(const InvariantProductMeasure& m, long N, const WeightsConfig& cfg)
    : m_(m), N_(N) {
  if (N < 0) throw PreconditionError("truncation must be >= 0");
  LogProductSeries s = LogProductSeries::compute(m.spec, std::max(N, cfg.horizon));
  SummabilityVerdict sv = summability(s, m.p, cfg);
  if (sv.status != SeriesStatus::Converges)
    throw NotSummable("product measure needs summable inverse products, got " + to_string(sv.status));
  series_ = N < s.horizon() ? LogProductSeries::compute(m.spec, N) : s;
}

std::vector<std::complex<double>> ProductSampler::draw_xi(std::uint64_t seed, std::uint64_t index) const {
  auto rng = rng_stream(seed, index);
  std::vector<std::complex<double>> xi(N_ + 1);
  for (auto& z : xi) z = m_.mu0.sample(rng);
  return xi;
}

LogVector ProductSampler::draw_log(std::uint64_t seed, std::uint64_t index) const {
  auto xi = draw_xi(seed, index);
  LogVector x(N_ + 1);
  for (long n = 0; n <= N_; ++n) {
    LogCoord c = LogCoord::from_value(xi[n]);
    if (c.is_zero()) continue;
    x[n].log_abs = c.log_abs - series_.log_dd(n);
    x[n].phase = wrap_phase(c.phase - series_.phase(n));
  }
  return x;
}

std::vector<std::complex<double>> ProductSampler::draw(std::uint64_t seed, std::uint64_t index) const {
  auto x = draw_xi(seed, index);
  for (long n = 0; n <= N_; ++n) {
    const double c = exp_dd(-series_.log_dd(n));
    const double ph = series_.phase(n);
    if (ph == 0.0)
      x[n] *= c;
    else if (ph == kPi)
      x[n] *= -c;
    else
      x[n] *= std::polar(c, -ph);
  }
  return x;
}

std::vector<std::complex<double>> sample(const InvariantProductMeasure& m, long N, std::uint64_t seed) {
  return ProductSampler(m, N).draw(seed, 0);
}

// ------------------------------------------------------ phase symmetrizing

MarginalMeasure symmetrize_phase(const MarginalMeasure& mu0, Field field) {
  if (std::holds_alternative<Gaussian>(mu0.kind())) return mu0;
  if (field == Field::Complex)
    throw UnsupportedKind("rotation-invariant version of a " + mu0.kind_name() + " law has no exact form");
  if (auto* d = std::get_if<DiscreteGroup>(&mu0.kind())) {
    std::map<double, double> merged;
    for (size_t i = 0; i < d->support.size(); ++i) {
      if (d->support[i].imag() != 0.0) throw UnsupportedKind("complex support in a real field");
      merged[d->support[i].real()] += 0.5 * d->weights[i];
      merged[-d->support[i].real()] += 0.5 * d->weights[i];
    }
    DiscreteGroup out;
    for (const auto& [s, w] : merged) {
      out.support.emplace_back(s, 0.0);
      out.weights.push_back(w);
    }
    return MarginalMeasure(std::move(out));
  }
  GridDensity g;
  if (auto* u = std::get_if<UniformInterval>(&mu0.kind())) {
    if (u->a == -u->b) return mu0;
    g = GridDensity{u->a, u->b, {1.0 / (u->b - u->a), 1.0 / (u->b - u->a)}, {}};
  } else {
    g = std::get<GridDensity>(mu0.kind());
  }
  const double M = std::max(std::abs(g.lo), std::abs(g.hi));
  auto K = fit_symmetric_grid({g.lo, g.hi, -g.lo, -g.hi}, M, g.step());
  if (!K) {
    // coarser base steps for intervals whose endpoints share a small common unit
    for (long d = 2; d <= 4096 && !K; ++d) K = fit_symmetric_grid({g.lo, g.hi, -g.lo, -g.hi, g.lo + g.step()}, M, 2 * M / d);
  }
  if (!K) throw UnsupportedKind("no uniform grid carries the symmetrized density exactly");
  return MarginalMeasure(even_part(g, M, *K));
}

std::complex<double> sample_phase_randomized(const MarginalMeasure& mu0, Field field, std::mt19937_64& rng) {
  std::complex<double> xi = mu0.sample(rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (field == Field::Real) return unif(rng) < 0.5 ? -xi : xi;
  return xi * std::polar(1.0, 2 * kPi * unif(rng));
}

// -------------------------------------------------------- support checks

Verdict ell1_support_test(const MarginalMeasure& mu0, const WeightSpec& spec, const EpsilonGenerator& eps,
                          long horizon, const SeriesConfig& cfg) {
  if (!(eps.c > 0) || !eps.summable()) throw PreconditionError("epsilon sequence must be positive and summable");
  LogProductSeries s = LogProductSeries::compute(spec, horizon);
  std::vector<double> terms;
  terms.reserve(horizon);
  for (long n = 1; n <= horizon; ++n) {
    // atoms sitting on the threshold up to rounding count as not exceeding it
    double log_x = s.log(n) + std::log(eps.at(n));
    terms.push_back(std::exp(mu0.log_tail(log_x + 1e-12 * (1.0 + std::abs(log_x)))));
  }
  SeriesCertificate cert = certify_series(terms, 1, cfg);
  Verdict v;
  v.rule = Rule::EllOneSupport;
  v.horizon = horizon;
  v.status = cert.status == SeriesStatus::Converges ? Status::Established : Status::Undecided;
  v.evidence = {{"partial_sum", cert.partial_sum}, {"series", to_string(cert.status)}, {"series_rule", cert.rule}};
  if (cert.tail_bound >= 0) v.evidence["tail_bound"] = cert.tail_bound;
  return v;
}

Verdict null_sequence_support_test(const MarginalMeasure& mu0, const WeightSpec& spec, long horizon) {
  (void)mu0;  // every supported law avoids the point mass at 0
  TailForm tf = tail_form(spec);
  Verdict v;
  v.rule = Rule::NullSequenceSupport;
  v.horizon = horizon;
  bool bounded = false;
  std::string why;
  if (tf.kind != TailForm::Kind::Unknown) {
    if (tf.rate < 0) {
      bounded = true;
      why = "products tend to 0";
    } else if (tf.rate == 0 && tf.kind != TailForm::Kind::Sparse) {
      bounded = true;
      why = "products eventually of constant modulus";
    } else if (tf.rate == 0 && tf.schedule->law == ExceptionSchedule::Law::Reciprocal) {
      bounded = true;
      why = "unit base with exceptions shrinking to 0";
    }
  }
  v.status = bounded ? Status::Established : Status::Undecided;
  v.evidence = {{"claim", "measure of c0 is 0"}, {"reason", bounded ? why : "products may tend to infinity"}};
  return v;
}

}  // namespace shiftlab
