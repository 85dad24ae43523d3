#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/orbits.hpp"

using namespace shiftlab;
using shiftlab::testing::fuzz_corpus;
using shiftlab::testing::ks_critical_1pct;
using shiftlab::testing::ks_statistic;
using shiftlab::testing::ratio_power;
using shiftlab::testing::scaled_unit;

namespace {

using cvec = std::vector<std::complex<double>>;

WeightSpec constant(double c) { return WeightSpec::constant(Scalar::real(c)); }

double lp_norm(const cvec& x, double p) {
  double s = 0.0;
  for (auto z : x) s += std::pow(std::abs(z), p);
  return std::pow(s, 1.0 / p);
}

cvec random_vector(std::mt19937_64& rng, std::size_t len) {
  std::normal_distribution<double> g;
  cvec x;
  for (std::size_t i = 0; i < len; ++i) x.emplace_back(g(rng), g(rng));
  return x;
}

}  // namespace

TEST_CASE("shift_power examples") {
  cvec e3 = {0, 0, 0, 1};
  cvec y = shift_power(constant(2), e3, 3);
  REQUIRE(y.size() == 1);
  CHECK(y[0] == std::complex<double>(8.0, 0.0));

  cvec x = {1.0, -2.0, 0.5};
  CHECK(shift_power(constant(3), x, 0) == x);

  FixedPoint fp = fixed_point(constant(2), 2, 20);
  for (long n = 0; n < 20; ++n) {
    LogVector z = shift_power(constant(2), fp.x, n);
    for (size_t j = 0; j < z.size(); ++j) CHECK(z[j] == fp.x[j]);
  }
}

TEST_CASE("visit density examples") {
  FixedPoint fp = fixed_point(constant(2), 2, 300);
  Region near_fp = Region::ball(values(fp.x), 0.1);
  VisitDensity at_fp = visit_density(constant(2), fp.x, near_fp, 200, 2.0, fp.tail_bound);
  CHECK(at_fp.hits.size() == 201);
  CHECK(at_fp.lower_density_estimate == 1.0);
  CHECK(at_fp.upper_density_estimate == 1.0);

  LogVector x = to_log_vector({3.0, -1.0, 2.0, 5.0});
  VisitDensity early = visit_density(constant(0.5), x, Region::ball({0.0}, 0.5), 1000);
  VisitDensity shrink = visit_density(constant(0.5), x, Region::ball({0.0}, 0.5), 100000);
  CHECK(shrink.lower_density_estimate > early.lower_density_estimate);
  CHECK(shrink.lower_density_estimate > 0.99);
  CHECK(shrink.upper_density_estimate == doctest::Approx(1.0).epsilon(1e-4));

  const long H = 10000;
  ProductSampler s({MarginalMeasure::gaussian(1), constant(2), 2.0}, H + 64);
  LogVector g = s.draw_log(3);
  VisitDensity typical = visit_density(constant(2), g, Region::ball({0.3}, 0.5), H);
  CHECK(typical.lower_density_estimate > 0.0);
  CHECK(typical.prefixes.back() == H);
}

TEST_CASE("orbit trace csv") {
  LogVector x = to_log_vector({1.0, 1.0, 1.0});
  OrbitTrace t = orbit_trace(constant(2), x, {Region::half_space(0.5, "far")}, 2);
  std::string csv = t.to_csv();
  CHECK(csv.rfind("n,log_norm,coord0_abs,hit_far\n", 0) == 0);
  CHECK(t.visit_sets.at("far") == std::vector<long>{0, 1, 2});
}

TEST_CASE("regions must stay away from 0 for witnesses") {
  CHECK(Region::ball({3.0}, 2.9).excludes_zero(2));
  CHECK_FALSE(Region::ball({1.0}, 1.0).excludes_zero(2));
  CHECK(Region::kernel(4, 0.5).excludes_zero(2));
  InvariantProductMeasure m{MarginalMeasure::gaussian(1), scaled_unit(2), 2.0};
  CHECK_THROWS_AS(empirical_orthogonality_witness(scaled_unit(2), scaled_unit(3), m, m, Region::ball({0.5}, 1.0)),
                  PreconditionError);
}

TEST_CASE("empirical witness for 2B against 3B") {
  InvariantProductMeasure mu{MarginalMeasure::gaussian(1), scaled_unit(2), 2.0};
  InvariantProductMeasure mv{MarginalMeasure::gaussian(1), scaled_unit(3), 2.0};
  Region K = Region::ball({3.0}, 2.9);
  WitnessConfig cfg;
  cfg.mc_samples = 4000;
  cfg.horizon = 64;
  cfg.seed = 9;
  EmpiricalWitness w = empirical_orthogonality_witness(scaled_unit(2), scaled_unit(3), mu, mv, K, cfg);
  CHECK(w.est_joint_pullback + 3 * w.se < cfg.epsilon);
  CHECK(w.q_curve.size() == static_cast<size_t>(w.n_star + 1));
  auto [q, se] = joint_pullback_estimate(scaled_unit(2), scaled_unit(3), mu, K, w.n_star, 4000, 12345);
  CHECK(q < 2 * cfg.epsilon);
  CHECK(se >= 0.0);
}

TEST_CASE("identical dynamics never produce a witness") {
  InvariantProductMeasure m{MarginalMeasure::gaussian(1), constant(2), 2.0};
  WitnessConfig cfg;
  cfg.mc_samples = 2000;
  cfg.horizon = 12;
  Region K = Region::ball({2.0}, 1.9);
  CHECK_THROWS_AS(empirical_orthogonality_witness(constant(2), constant(2), m, m, K, cfg), NoWitnessFound);
  auto [q0, se0] = joint_pullback_estimate(constant(2), constant(2), m, K, 0, 2000, 4);
  CHECK(q0 > 0.1);
}

TEST_CASE("kernel regions empty out once the product ratio drops below gamma / M") {
  InvariantProductMeasure mu{MarginalMeasure::gaussian(1), scaled_unit(2), 2.0};
  const double M = 4.0, gamma = 0.5;
  Region K = Region::kernel(M, gamma);
  for (long n = 0; n <= 12; ++n) {
    auto [q, se] = joint_pullback_estimate(scaled_unit(2), scaled_unit(3), mu, K, n, 3000, 8);
    if (n * std::log(2.0 / 3.0) < std::log(gamma / M)) {
      CHECK(q == 0.0);
      CHECK(se == 0.0);
    }
  }
}

TEST_CASE("fhc transfer examples") {
  FhcTransfer same = fhc_transfer_constant(constant(2), constant(2), 1000);
  CHECK(same.K_hat == 1.0);
  REQUIRE(same.a_hat);
  CHECK(*same.a_hat == 1.0);

  FhcTransfer tele = fhc_transfer_constant(constant(2), ratio_power(2, 1, 1), 100000);
  CHECK(tele.K_hat == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(tele.a_hat);
  CHECK(*tele.a_hat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tele.converged.established());

  CHECK(fhc_transfer_constant(constant(2), constant(3), 1000).converged.refuted());
}

TEST_CASE("shift powers compose and act linearly") {
  std::mt19937_64 rng(31);
  for (const WeightSpec& spec : fuzz_corpus(30, 13)) {
    cvec x = random_vector(rng, 40), y = random_vector(rng, 40);
    for (auto [m, n] : {std::pair{0L, 3L}, {2L, 5L}, {7L, 11L}}) {
      cvec lhs = shift_power(spec, shift_power(spec, x, m), n);
      cvec rhs = shift_power(spec, x, m + n);
      REQUIRE(lhs.size() == rhs.size());
      for (size_t j = 0; j < lhs.size(); ++j) CHECK(std::abs(lhs[j] - rhs[j]) <= 1e-12 * std::abs(rhs[j]));
    }
    std::complex<double> a(0.5, -1.5), b(-2.0, 0.25);
    cvec comb(x.size());
    for (size_t i = 0; i < x.size(); ++i) comb[i] = a * x[i] + b * y[i];
    cvec lhs = shift_power(spec, comb, 4);
    cvec sx = shift_power(spec, x, 4), sy = shift_power(spec, y, 4);
    for (size_t j = 0; j < lhs.size(); ++j) {
      std::complex<double> rhs = a * sx[j] + b * sy[j];
      double scale = std::abs(a * sx[j]) + std::abs(b * sy[j]);
      CHECK(std::abs(lhs[j] - rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("norms of shifted samples keep the law of the sample norm") {
  for (const WeightSpec& w : {constant(2), ratio_power(2, 1, 1)}) {
    for (const MarginalMeasure& mu0 : {MarginalMeasure::gaussian(1), MarginalMeasure::uniform(1, 3)}) {
      ProductSampler s({mu0, w, 2.0}, 60);
      std::vector<double> before, after;
      for (int i = 0; i < 3000; ++i) {
        before.push_back(lp_norm(s.draw(1, i), 2.0));
        after.push_back(lp_norm(shift_power(w, s.draw(2, i), 1), 2.0));
      }
      CHECK(ks_statistic(before, after) < ks_critical_1pct(3000, 3000));
    }
  }
}
