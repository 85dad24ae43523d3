#include <doctest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/hellinger.hpp"

using namespace shiftlab;
using shiftlab::testing::ratio_power;
using shiftlab::testing::scaled_unit;

namespace {

WeightSpec constant(double c) { return WeightSpec::constant(Scalar::real(c)); }

InvariantProductMeasure gaussian_product(const WeightSpec& w, double sigma = 1.0) {
  return {MarginalMeasure::gaussian(sigma), w, 2.0};
}

}  // namespace

TEST_CASE("hellinger examples") {
  CHECK(hellinger(MarginalMeasure::gaussian(0.7), MarginalMeasure::gaussian(0.7)) == doctest::Approx(1.0).epsilon(1e-15));
  double expect = std::sqrt(std::sqrt(3.0) / 2.0);
  CHECK(hellinger(MarginalMeasure::gaussian(1), MarginalMeasure::gaussian(std::sqrt(3.0))) ==
        doctest::Approx(expect).epsilon(1e-14));
  CHECK(std::abs(hellinger_quadrature(MarginalMeasure::gaussian(1), MarginalMeasure::gaussian(std::sqrt(3.0))) - expect) <
        1e-8);
  CHECK(hellinger(MarginalMeasure::uniform(0, 1), MarginalMeasure::uniform(0, 2)) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(hellinger(MarginalMeasure::discrete({1.0, 2.0}, {0.5, 0.5}), MarginalMeasure::discrete({2.0, 3.0}, {0.5, 0.5})) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(hellinger(MarginalMeasure::discrete({1.0}, {1.0}), MarginalMeasure::gaussian(1)) == 0.0);
}

TEST_CASE("hellinger is symmetric, bounded and scale invariant") {
  std::vector<MarginalMeasure> ms = {MarginalMeasure::gaussian(1),     MarginalMeasure::gaussian(2.5),
                                     MarginalMeasure::uniform(0, 1),   MarginalMeasure::uniform(-1, 2),
                                     MarginalMeasure::uniform(0.5, 4), MarginalMeasure::discrete({1.0, -1.0}, {0.3, 0.7})};
  for (const auto& a : ms)
    for (const auto& b : ms) {
      double ab = hellinger(a, b), ba = hellinger(b, a);
      CHECK(std::abs(ab - ba) < 1e-12);
      CHECK(ab >= 0.0);
      CHECK(ab <= 1.0 + 1e-12);
      for (double log_c : {std::log(3.0), -1.2}) {
        double scaled = hellinger(a.scaled(log_c), b.scaled(log_c));
        CHECK(std::abs(scaled - ab) < 1e-8);
      }
    }
  CHECK(hellinger(MarginalMeasure::uniform(0, 1), MarginalMeasure::uniform(2, 3)) == 0.0);
}

TEST_CASE("mixed measures add atom and continuous contributions") {
  MixedMeasure a{{{1.0, 0.5}}, MarginalMeasure::uniform(0, 1), 0.5};
  MixedMeasure b{{{1.0, 0.25}}, MarginalMeasure::uniform(0, 1), 0.75};
  CHECK(hellinger(a, b) == doctest::Approx(std::sqrt(0.125) + std::sqrt(0.375)).epsilon(1e-9));
}

TEST_CASE("gaussian deficit matches its quadratic Taylor term with a cubic remainder") {
  for (int d : {1, 2}) {
    double worst = 0.0;
    for (int i = -1000; i <= 1000; ++i) {
      if (i == 0) continue;
      double lam = 1.0 + 1e-4 * i;
      double x = 1.0 - lam;
      double deficit = gaussian_deficit(std::log(lam), d);
      CHECK(deficit == doctest::Approx(1.0 - gaussian_hellinger(1.0, lam, d)).epsilon(1e-9));
      worst = std::max(worst, std::abs(deficit - d / 4.0 * x * x) / std::abs(x * x * x));
    }
    CHECK(worst <= 0.35 * d);
  }
}

TEST_CASE("kakutani examples") {
  const long H = 20000;
  HellingerReport eq = kakutani_decide(gaussian_product(ratio_power(2, 1, 2)), gaussian_product(constant(2)), H);
  CHECK(eq.verdict == KakutaniVerdict::Equivalent);
  HellingerReport orth = kakutani_decide(gaussian_product(ratio_power(2, 1, 0.5)), gaussian_product(constant(2)), H);
  CHECK(orth.verdict == KakutaniVerdict::Orthogonal);
  HellingerReport same = kakutani_decide(gaussian_product(constant(2)), gaussian_product(constant(2)), H);
  CHECK(same.verdict == KakutaniVerdict::Equivalent);
  for (double h : same.per_n) CHECK(h == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("kakutani agrees with the gaussian equivalence test") {
  const long H = 20000;
  struct Pair {
    WeightSpec u, v;
  };
  std::vector<Pair> pairs = {{ratio_power(2, 1, 1), constant(2)},
                             {constant(2), constant(3)},
                             {scaled_unit(2), scaled_unit(2)},
                             {ratio_power(2, 1, 0.5), constant(2)}};
  for (const Pair& pr : pairs) {
    GaussianEquivalence ge = gaussian_equivalence_test(pr.u, pr.v, 2, H);
    if (ge.exists_kappa.undecided() || !ge.kappa_hat) continue;
    HellingerReport r = kakutani_decide(gaussian_product(pr.u), gaussian_product(pr.v, *ge.kappa_hat), H);
    if (r.verdict == KakutaniVerdict::Undecided) continue;
    CHECK((r.verdict == KakutaniVerdict::Equivalent) == ge.exists_kappa.established());
  }
}

TEST_CASE("gaussian equivalence examples") {
  GaussianEquivalence tele = gaussian_equivalence_test(constant(2), ratio_power(2, 1, 1), 2, 100000);
  CHECK(tele.exists_kappa.established());
  REQUIRE(tele.kappa_hat);
  CHECK(*tele.kappa_hat == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(tele.witnesses.has_value());

  CHECK(gaussian_equivalence_test(constant(2), constant(3), 2, 5000).exists_kappa.refuted());

  GaussianEquivalence same = gaussian_equivalence_test(constant(2), constant(2), 2, 5000);
  CHECK(same.exists_kappa.established());
  CHECK(*same.kappa_hat == 1.0);
  CHECK(same.deficit.partial_sum == 0.0);
}

TEST_CASE("discrete marginal examples") {
  MarginalMeasure pm = MarginalMeasure::discrete({1.0, -1.0}, {0.5, 0.5});
  WeightSpec pre = WeightSpec::prefix({Scalar::real(1), Scalar::real(4)}, Scalar::real(2));
  DiscreteMarginalResult eventually = discrete_marginal_test(constant(2), pre, pm, pm, 1000);
  CHECK(eventually.verdict.established());
  CHECK(eventually.constructed_mu0_v.has_value());
  CHECK(discrete_marginal_test(constant(2), constant(3), pm, pm, 1000).verdict.refuted());
  CHECK(discrete_marginal_test(constant(2), constant(2), pm, pm, 1000).verdict.established());
  CHECK_THROWS_AS(discrete_marginal_test(constant(2), constant(2), pm, MarginalMeasure::gaussian(1), 1000),
                  PreconditionError);
}

TEST_CASE("translate examples") {
  CHECK(translate_test([](long n) { return 1.0 / static_cast<double>(n); }, true, 20000).undecided());
  CHECK(translate_test([](long n) { return 1.0 / std::sqrt(static_cast<double>(n)); }, true, 20000).established());
  Verdict zero = translate_test([](long) { return 0.0; }, true, 1000);
  CHECK(zero.undecided());
  CHECK(zero.evidence["series"] == "Converges");
}

TEST_CASE("kakutani witness examples") {
  InvariantProductMeasure mu = gaussian_product(scaled_unit(2)), mv = gaussian_product(scaled_unit(3));
  KakutaniWitness w = kakutani_witness(mu, mv, 0, 0.1, 10000, 5);
  CHECK(w.N > 0);
  CHECK(w.certified);
  CHECK(w.est_mu_v_of_E < 0.1);
  CHECK(w.est_mu_u_of_complement < 0.1);

  CHECK_THROWS_AS(kakutani_witness(mu, mu, 0, 0.1, 1000, 5, 2000), InsufficientHorizon);
  InvariantProductMeasure near = gaussian_product(ratio_power(2, 1, 2)), base = gaussian_product(constant(2));
  CHECK_THROWS_AS(kakutani_witness(near, base, 0, 0.1, 1000, 5, 2000), InsufficientHorizon);
}
