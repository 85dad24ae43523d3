#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "shiftlab/autocorr.hpp"
#include "shiftlab/errors.hpp"

using namespace shiftlab;
using shiftlab::testing::ratio_power;

namespace {

WeightSpec constant(double c) { return WeightSpec::constant(Scalar::real(c)); }

const std::vector<double> kAlphas = {-3.0, -1.7, -0.9, -0.3, -0.05, 0.0, 0.05, 0.3, 0.9, 1.7, 3.0};

// sqrt of a hat density on [0, 1] peaking at 1/2
MarginalMeasure hat_grid(double scale) {
  std::vector<double> values;
  const int K = 64;
  for (int i = 0; i <= K; ++i) values.push_back(std::min(i, K - i));
  return MarginalMeasure::grid(GridDensity::normalized(0.0, 1.0 / scale, values));
}

}  // namespace

TEST_CASE("acf examples") {
  DensityProfile ind = DensityProfile::uniform(0, 1);
  for (double a : kAlphas) CHECK(acf(ind, a) == doctest::Approx(std::max(0.0, 1 - std::abs(a))).epsilon(1e-12));
  DensityProfile g = DensityProfile::gaussian(1);
  for (double a : kAlphas) CHECK(acf(g, a) == doctest::Approx(std::exp(-a * a / 8)).epsilon(1e-10));
  DensityProfile wide = DensityProfile::uniform(-1, 3);
  CHECK(acf(wide, 0.0) == doctest::Approx(wide.norm2() * wide.norm2()).epsilon(1e-12));
}

TEST_CASE("theta and psi examples") {
  for (const DensityProfile& f : {DensityProfile::uniform(0, 1), DensityProfile::gaussian(2), DensityProfile::uniform(-2, 1)})
    CHECK(theta(f, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  for (double lam : {0.25, 0.5, 2.0, 4.0, 10.0}) {
    CHECK(theta(DensityProfile::gaussian(1), lam) == doctest::Approx(std::sqrt(2 * lam / (1 + lam * lam))).epsilon(1e-10));
    CHECK(theta(DensityProfile::uniform(0, 1), lam) == doctest::Approx(std::pow(std::max(lam, 1 / lam), -0.5)).epsilon(1e-10));
  }
  DensityProfile f = DensityProfile::gaussian(1);
  CHECK(psi(f, f, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  for (double a : {0.5, 2.0, 3.0})
    for (double lam : {0.7, 1.0, 2.5})
      CHECK(psi(f, DensityProfile::gaussian(1 / a), lam) == doctest::Approx(theta(f, lam / a)).epsilon(1e-9));
}

TEST_CASE("log substitution norms") {
  auto [hp, hm] = log_substitution(DensityProfile::uniform(0, 1));
  CHECK(acf(hp, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(acf(hm, 0.0) == 0.0);
  for (const DensityProfile& even : {DensityProfile::gaussian(1), DensityProfile::uniform(-1, 1)}) {
    auto [p, m] = log_substitution(even);
    CHECK(acf(p, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(acf(m, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("one-sided slopes examples") {
  auto [hp, hm] = log_substitution(DensityProfile::uniform(0, 1));
  Slopes s = one_sided_slopes(hp);
  CHECK(s.jump_formula_value == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(s.right_slope == doctest::Approx(-0.5).epsilon(1e-6));

  Slopes g = one_sided_slopes(DensityProfile::gaussian(1));
  CHECK(g.jump_formula_value == 0.0);
  CHECK(std::abs(g.right_slope) < 1e-6);
  CHECK(std::abs(g.left_slope) < 1e-6);

  Slopes two = one_sided_slopes(DensityProfile::uniform(0, 1));
  CHECK(two.jump_formula_value == -1.0);
  CHECK(two.right_slope == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(two.left_slope == doctest::Approx(-two.right_slope).epsilon(1e-8));

  DensityProfile unknown = DensityProfile::gaussian(1);
  unknown.smooth_class = SmoothClass::Unknown;
  CHECK_THROWS_AS(one_sided_slopes(unknown), NoDiscontinuityList);
}

TEST_CASE("equivalence regime examples") {
  const long H = 20000;
  DensityProfile uni = DensityProfile::uniform(0, 1);
  CHECK(equivalence_regime(uni, constant(2), ratio_power(2, 1, 2), 1.0, H).established());
  CHECK(equivalence_regime(uni, constant(2), ratio_power(2, 1, 1), 1.0, H).refuted());
  CHECK(equivalence_regime(DensityProfile::gaussian(1), constant(2), ratio_power(2, 1, 1), 1.0, H).established());

  DensityProfile bad = DensityProfile::uniform(0, 1);
  bad.smooth_class = SmoothClass::W12;
  CHECK_THROWS_AS(equivalence_regime(bad, constant(2), constant(2), 1.0, 100), HypothesisViolation);
  CHECK_THROWS_AS(equivalence_regime(uni, constant(-2), constant(2), 1.0, 100), PreconditionError);
}

TEST_CASE("limit scale examples") {
  DensityProfile g = DensityProfile::gaussian(1);
  LimitScale tele = limit_scale_detect(constant(2), ratio_power(2, 1, 1), g, g, 100000);
  CHECK(tele.a_hat.established());
  REQUIRE(tele.a);
  CHECK(*tele.a == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tele.density_match < 1e-9);

  CHECK(limit_scale_detect(constant(2), constant(3), g, g, 5000).a_hat.refuted());

  DensityProfile p = DensityProfile::from_measure(hat_grid(1.0));
  DensityProfile q = DensityProfile::from_measure(hat_grid(2.0));
  WeightSpec u = WeightSpec::prefix({Scalar::real(4)}, Scalar::real(2));
  LimitScale two = limit_scale_detect(u, constant(2), p, q, 5000);
  CHECK(two.a_hat.established());
  REQUIRE(two.a);
  CHECK(*two.a == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(two.density_match < 1e-9);
}

TEST_CASE("acf is even and maximal at 0") {
  for (const DensityProfile& h :
       {DensityProfile::uniform(0, 1), DensityProfile::gaussian(0.5), DensityProfile::from_measure(hat_grid(1.0)),
        log_substitution(DensityProfile::uniform(1, 3)).first, log_substitution(DensityProfile::gaussian(1)).second}) {
    double at0 = acf(h, 0.0);
    for (double a : kAlphas) {
      CHECK(std::abs(acf(h, a) - acf(h, -a)) < 1e-10);
      CHECK(acf(h, a) <= at0 + 1e-10);
    }
  }
}

TEST_CASE("theta splits into the two log autocorrelations and is symmetric in lambda") {
  for (const DensityProfile& f : {DensityProfile::uniform(0, 1), DensityProfile::gaussian(1)}) {
    auto [hp, hm] = log_substitution(f);
    for (double lam : {0.5, 0.9, 1.0, 1.1, 2.0}) {
      double th = theta(f, lam);
      CHECK(std::abs(th - acf(hp, std::log(lam)) - acf(hm, std::log(lam))) < 1e-8);
      CHECK(std::abs(th - theta(f, 1 / lam)) < 1e-8);
    }
  }
}

TEST_CASE("smooth profiles have quadratic acf at 0") {
  DensityProfile g = DensityProfile::gaussian(1);
  double at0 = acf(g, 0.0);
  std::vector<double> ratios;
  for (double a : {1e-1, 1e-2, 1e-3}) ratios.push_back((at0 - acf(g, a)) / (a * a));
  for (double r : ratios) CHECK(r > 0.0);
  CHECK(std::abs(ratios[2] - ratios[1]) < std::abs(ratios[1] - ratios[0]));
  CHECK(ratios[2] == doctest::Approx(1.0 / 8).epsilon(1e-4));
  const double s = 1e-2;
  CHECK(acf(g, s) - 2 * at0 + acf(g, -s) < 0.0);
}

TEST_CASE("jump profiles have linear acf at 0") {
  DensityProfile u = DensityProfile::uniform(0, 1);
  double at0 = acf(u, 0.0);
  for (double a : {1e-1, 1e-2, 1e-3}) {
    CHECK((at0 - acf(u, a)) / a == doctest::Approx(1.0).epsilon(1e-9));
  }
  auto [hp, hm] = log_substitution(u);
  double hp0 = acf(hp, 0.0);
  for (double a : {1e-2, 1e-3, 1e-4}) CHECK((hp0 - acf(hp, a)) / a == doctest::Approx(0.5).epsilon(1e-3));
  double prev = 0.0;
  for (double a : {1e-1, 1e-2, 1e-3}) {
    double quad = (at0 - acf(u, a)) / (a * a);
    CHECK(quad > prev);
    prev = quad;
  }
}
