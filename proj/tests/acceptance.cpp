// One PASS/FAIL line per acceptance criterion; exit code 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "shiftlab/autocorr.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/hellinger.hpp"
#include "shiftlab/measures.hpp"
#include "shiftlab/orbits.hpp"
#include "shiftlab/orthocheck.hpp"
#include "shiftlab/report.hpp"
#include "shiftlab/weights.hpp"

using namespace shiftlab;
using shiftlab::testing::ratio_power;
using shiftlab::testing::scaled_unit;
using shiftlab::testing::sparse_pair_side;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. closed form against quadrature on the 25-point grid, d = 1 and 2
Outcome gaussian_hellinger_grid() {
  const double sigmas[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  auto t0 = Clock::now();
  double worst = 0.0;
  for (int d : {1, 2})
    for (double s : sigmas)
      for (double s2 : sigmas) {
        double closed = gaussian_hellinger(s, s2, d);
        double quad = hellinger_quadrature(MarginalMeasure::gaussian(s, d), MarginalMeasure::gaussian(s2, d));
        worst = std::max(worst, std::abs(closed - quad));
      }
  double t = seconds_since(t0);
  return {worst < 1e-8 && t < 5.0, fmt("max |closed - quad| = %.2e", worst) + fmt(", %.2f s", t)};
}

// 2. Kakutani dichotomy at horizon 1e6
Outcome kakutani_dichotomy() {
  const long H = 1000000;
  const WeightSpec two = WeightSpec::constant(Scalar::real(2.0));
  auto run = [&](double s, double& t) {
    auto t0 = Clock::now();
    HellingerReport r = kakutani_decide({MarginalMeasure::gaussian(1.0), ratio_power(2.0, 1.0, s), 2.0},
                                        {MarginalMeasure::gaussian(1.0), two, 2.0}, H);
    t = seconds_since(t0);
    return r.verdict;
  };
  double t1 = 0, t2 = 0;
  KakutaniVerdict a = run(2.0, t1);
  KakutaniVerdict b = run(0.5, t2);
  bool ok = a == KakutaniVerdict::Equivalent && b == KakutaniVerdict::Orthogonal && t1 < 2.0 && t2 < 2.0;
  return {ok, "1+n^-2: " + to_string(a) + fmt(" (%.2f s)", t1) + ", 1+n^-1/2: " + to_string(b) +
                  fmt(" (%.2f s)", t2)};
}

// 3. sparse exceptions at 5 r_k + {1,4} and 5 r_k + {2,3}, r_k = 4^k
Outcome sparse_periodic_example() {
  const WeightSpec u = sparse_pair_side({1, 4});
  const WeightSpec v = sparse_pair_side({2, 3});
  const long H = 100000;
  std::string detail;
  bool ok = true;
  for (const WeightSpec* w : {&u, &v}) {
    SummabilityVerdict sv = summability(*w, 2.0, H);
    ok = ok && sv.status == SeriesStatus::Converges;
  }
  detail += ok ? "S_2 both convergent" : "S_2 not certified";

  auto w = periodic_witness_at(u, v, 2.0, 5, 0, 1000, H);
  bool wit = w && w->C.exact && *w->C.exact == Rational::integer(1) && !w->numeric;
  if (wit) {
    const long len = static_cast<long>(w->vector.size());
    LogProductSeries su = LogProductSeries::compute(u, len - 1);
    LogProductSeries sv = LogProductSeries::compute(v, len - 1);
    LogVector bu = apply_shift_power(su, w->vector, 5);
    LogVector bv = apply_shift_power(sv, w->vector, 5);
    for (long j = 0; j + 5 < len; ++j) wit = wit && bu[j] == w->vector[j] && bv[j] == w->vector[j];
  }
  ok = ok && wit;
  detail += wit ? "; (d,j,C) = (5,0,1) with B_u^5 x = x = B_v^5 x exactly" : "; periodic witness (5,0,1) failed";
  if (auto first = shared_periodic_point(u, v, 2.0, 64, 1000, H))
    detail += "; search order finds d=" + std::to_string(first->d) + " j=" + std::to_string(first->j) + " first";

  Verdict sim = similarity_test(u, v, H);
  ok = ok && sim.refuted();
  LogProductSeries lu = LogProductSeries::compute(u, H), lv = LogProductSeries::compute(v, H);
  double worst = 0.0;
  long r = 1;
  for (long k = 1; k <= 6; ++k) {
    r *= 4;
    double lo = (lu.log_dd(5 * r + 1) - lv.log_dd(5 * r + 1)).value();
    double hi = (lu.log_dd(5 * r + 3) - lv.log_dd(5 * r + 3)).value();
    double want = std::log(2.0 * k);
    worst = std::max({worst, std::abs(lo + want), std::abs(hi - want)});
  }
  ok = ok && worst < 1e-12;
  detail += "; similarity " + to_string(sim.status) + fmt(", max |log lambda -+ ln 2k| = %.1e", worst);
  return {ok, detail};
}

// 4. telescoping epsilon_n = 1/n
Outcome telescoping_example() {
  const WeightSpec u = WeightSpec::constant(Scalar::real(2.0));
  const WeightSpec v = ratio_power(2.0, 1.0, 1.0);
  const long H = 100000;
  GaussianEquivalence g = gaussian_equivalence_test(u, v, 2.0, H);
  const double bound = M_PI * M_PI / 6 + 1e-6;
  double top = 0.0;
  for (double s : g.deficit_partial_sums) top = std::max(top, s);
  bool kappa_ok = g.kappa_hat && std::abs(*g.kappa_hat - 1.0) < 1e-9;
  auto per = shared_periodic_point(u, v, 2.0, 64, 1000, H);
  bool ok = g.exists_kappa.established() && kappa_ok && top <= bound && !per;
  return {ok, "gaussian equivalence " + to_string(g.exists_kappa.status) +
                  fmt(", kappa_hat = %.12f", g.kappa_hat.value_or(NAN)) + fmt(", max partial sum %.6f", top) +
                  fmt(" <= %.6f", bound) + (per ? ", periodic point found" : ", no periodic point up to d = 64")};
}

// 5. 2B against 3B
Outcome scaled_pair() {
  const WeightSpec u = scaled_unit(2.0), v = scaled_unit(3.0);
  Verdict win = window_orthogonality_test(u, v, 4, 100000);
  InvariantProductMeasure mu{MarginalMeasure::gaussian(1.0), u, 2.0};
  InvariantProductMeasure mv{MarginalMeasure::gaussian(1.0), v, 2.0};
  Region K = Region::ball({3.0}, 2.9, "K");
  WitnessConfig wc;
  wc.mc_samples = 10000;
  wc.epsilon = 0.1;
  wc.horizon = 64;
  wc.seed = 2024;
  try {
    EmpiricalWitness w = empirical_orthogonality_witness(u, v, mu, mv, K, wc);
    auto [q2, se2] = joint_pullback_estimate(u, v, mu, K, w.n_star, 10000, 777);
    bool ok = win.established() && w.est_joint_pullback < 0.1 && q2 < 0.2;
    return {ok, "window " + to_string(win.status) + ", n_star = " + std::to_string(w.n_star) +
                    fmt(", q = %.4f", w.est_joint_pullback) + fmt(", second seed q = %.4f", q2)};
  } catch (const NoWitnessFound& e) {
    return {false, e.what()};
  }
}

// 6. E sum x_n^2 = 4/3 for Gaussian(1), w = 2
Outcome moment_identity_mc() {
  InvariantProductMeasure m{MarginalMeasure::gaussian(1.0), WeightSpec::constant(Scalar::real(2.0)), 2.0};
  const long N = default_truncation(m.spec, 2.0);
  ProductSampler sampler(m, N);
  const long M = 100000;
  std::vector<double> vals(M);
  for (long i = 0; i < M; ++i) {
    double s = 0.0;
    for (auto z : sampler.draw(99, static_cast<std::uint64_t>(i))) s += std::norm(z);
    vals[i] = s;
  }
  double mean = 0.0;
  for (double x : vals) mean += x;
  mean /= M;
  double var = 0.0;
  for (double x : vals) var += (x - mean) * (x - mean);
  double se = std::sqrt(var / (M - 1) / M);
  double dev = std::abs(mean - 4.0 / 3.0);
  return {dev < 3 * se, fmt("mean %.5f", mean) + fmt(", |mean - 4/3| = %.5f", dev) + fmt(", 3 SE = %.5f", 3 * se)};
}

// 7. uniform profile
Outcome uniform_theta() {
  DensityProfile f = DensityProfile::uniform(0.0, 1.0);
  double worst = 0.0;
  for (double l : {1.0, 1.5, 2.0, 4.0}) worst = std::max(worst, std::abs(theta(f, l) - 1.0 / std::sqrt(l)));
  auto [hp, hm] = log_substitution(f);
  Slopes s = one_sided_slopes(hp);
  bool ok = worst < 1e-6 && std::abs(s.right_slope + 0.5) < 1e-3 && std::abs(s.jump_formula_value + 0.5) < 1e-12 &&
            std::abs(s.right_slope - s.jump_formula_value) < 1e-3;
  return {ok, fmt("max |Theta - lambda^-1/2| = %.1e", worst) + fmt(", right slope %.6f", s.right_slope) +
                  fmt(", jump formula %.6f", s.jump_formula_value)};
}

// 8. Theta through the log substitution, and Theta(lambda) = Theta(1/lambda)
Outcome theta_identity() {
  double worst_split = 0.0, worst_sym = 0.0;
  for (const DensityProfile& f : {DensityProfile::uniform(0.0, 1.0), DensityProfile::gaussian(1.0)}) {
    auto [hp, hm] = log_substitution(f);
    for (double l : {0.5, 0.9, 1.1, 2.0}) {
      double th = theta(f, l);
      worst_split = std::max(worst_split, std::abs(th - acf(hp, std::log(l)) - acf(hm, std::log(l))));
      worst_sym = std::max(worst_sym, std::abs(th - theta(f, 1.0 / l)));
    }
  }
  return {worst_split < 1e-8 && worst_sym < 1e-8,
          fmt("max split error %.1e", worst_split) + fmt(", max symmetry error %.1e", worst_sym)};
}

// 9. sample-level invariance, cocycle and linearity
Outcome invariance_suite() {
  const std::vector<MarginalMeasure> laws = {MarginalMeasure::gaussian(1.0), MarginalMeasure::uniform(1.0, 3.0),
                                             MarginalMeasure::discrete({-1.0, 1.0, 2.0}, {0.3, 0.3, 0.4})};
  const std::vector<WeightSpec> specs = {WeightSpec::constant(Scalar::real(2.0)), ratio_power(2.0, 1.0, 1.0)};
  const std::size_t M = 2000;
  double worst_ratio = 0.0;
  for (const auto& mu0 : laws)
    for (const auto& w : specs) {
      InvariantProductMeasure m{mu0, w, 2.0};
      ProductSampler sampler(m, 60);
      std::vector<double> a(M), b(M);
      for (std::size_t i = 0; i < M; ++i) {
        a[i] = log_norm(sampler.draw_log(5, i), 2.0);
        b[i] = log_norm(apply_shift_power(sampler.series(), sampler.draw_log(5, M + i), 1), 2.0);
      }
      worst_ratio = std::max(worst_ratio, testing::ks_statistic(a, b) / testing::ks_critical_1pct(M, M));
    }

  double worst_cocycle = 0.0, worst_linear = 0.0;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (const auto& w : {specs[0], specs[1], sparse_pair_side({1, 4})}) {
    std::vector<std::complex<double>> x(80), y(80);
    for (long k = 0; k < 80; ++k) {
      x[k] = g(rng) * std::pow(0.5, k);
      y[k] = g(rng) * std::pow(0.5, k);
    }
    for (long mm : {1L, 3L, 7L})
      for (long n : {2L, 5L}) {
        auto lhs = shift_power(w, shift_power(w, x, mm), n);
        auto rhs = shift_power(w, x, mm + n);
        for (std::size_t j = 0; j < rhs.size(); ++j)
          if (rhs[j] != 0.0) worst_cocycle = std::max(worst_cocycle, std::abs(lhs[j] - rhs[j]) / std::abs(rhs[j]));
      }
    const std::complex<double> al(0.7, 0.0), be(-1.3, 0.0);
    std::vector<std::complex<double>> comb(80);
    for (long k = 0; k < 80; ++k) comb[k] = al * x[k] + be * y[k];
    auto lc = shift_power(w, comb, 4);
    auto bx = shift_power(w, x, 4), by = shift_power(w, y, 4);
    for (std::size_t j = 0; j < lc.size(); ++j) {
      std::complex<double> want = al * bx[j] + be * by[j];
      double scale = std::abs(al * bx[j]) + std::abs(be * by[j]);
      if (scale > 0) worst_linear = std::max(worst_linear, std::abs(lc[j] - want) / scale);
    }
  }
  bool ok = worst_ratio < 1.0 && worst_cocycle < 1e-12 && worst_linear < 1e-12;
  return {ok, fmt("max KS / critical = %.3f", worst_ratio) + fmt(", cocycle %.1e", worst_cocycle) +
                  fmt(", linearity %.1e", worst_linear)};
}

// 10. fixed points of bundled specs, classify implications on a fuzz corpus
Outcome fixed_points_and_classify() {
  const long N = 2000;
  long checked = 0;
  bool exact = true;
  for (const auto& ex : bundled_examples())
    for (const WeightSpec* w : {&ex.u, &ex.v}) {
      if (summability(*w, 2.0, 100000).status != SeriesStatus::Converges) continue;
      FixedPoint fp = fixed_point(*w, 2.0, N);
      LogProductSeries s = LogProductSeries::compute(*w, N);
      LogVector bx = apply_shift_power(s, fp.x, 1);
      for (long j = 0; j < N; ++j) exact = exact && bx[j] == fp.x[j];
      ++checked;
    }
  long violations = 0;
  auto corpus = testing::fuzz_corpus(50, 20240607);
  for (const auto& w : corpus) {
    Classification c = classify(w, 2.0, 20000);
    if (c.chaotic_fhc.established() && !c.mixing.established()) ++violations;
    if (c.mixing.established() && !c.hypercyclic.established()) ++violations;
    if (c.hypercyclic.refuted() && !c.mixing.refuted()) ++violations;
    if (c.mixing.refuted() && !c.chaotic_fhc.refuted()) ++violations;
  }
  return {exact && checked > 0 && violations == 0,
          std::to_string(checked) + " fixed points exact: " + (exact ? "yes" : "no") + ", " +
              std::to_string(violations) + " implication violations over " + std::to_string(corpus.size()) +
              " specs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gaussian hellinger closed form vs quadrature", gaussian_hellinger_grid},
      {"kakutani dichotomy at horizon 1e6", kakutani_dichotomy},
      {"sparse periodic pair (r_k = 4^k)", sparse_periodic_example},
      {"telescoping epsilon_n = 1/n", telescoping_example},
      {"scaled pair 2B vs 3B", scaled_pair},
      {"moment identity by Monte Carlo", moment_identity_mc},
      {"uniform profile Theta and slope", uniform_theta},
      {"Theta split identity and symmetry", theta_identity},
      {"invariance, cocycle and linearity", invariance_suite},
      {"fixed points and classify implications", fixed_points_and_classify},
  };
  int failed = 0;
  int idx = 0;
  for (const auto& [name, fn] : criteria) {
    ++idx;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", idx, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
