#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shiftlab/measures.hpp"
#include "shiftlab/quadrature.hpp"
#include "shiftlab/series.hpp"
#include "shiftlab/verdict.hpp"

namespace shiftlab {

struct HellingerConfig {
  QuadratureConfig quad;
  double atom_tol = 1e-12;  // relative distance at which two atoms coincide
};

// (2 s s' / (s^2 + s'^2))^{d/2}
double gaussian_hellinger(double sigma, double sigma2, int d);
// 1 - (2 lambda / (1 + lambda^2))^{d/2} as a function of x = log lambda,
// accurate near lambda = 1.
double gaussian_deficit(double log_lambda, int d);

double hellinger(const MarginalMeasure& alpha, const MarginalMeasure& beta, const HellingerConfig& cfg = {});
// Same integral evaluated by quadrature even when a closed form exists.
double hellinger_quadrature(const MarginalMeasure& alpha, const MarginalMeasure& beta,
                            const HellingerConfig& cfg = {});

// Atoms plus an optional absolutely continuous part of total mass
// 1 - sum of atom weights.
struct MixedMeasure {
  std::vector<std::pair<std::complex<double>, double>> atoms;
  std::optional<MarginalMeasure> continuous;  // normalized law of the continuous part
  double continuous_mass = 0.0;
};

double hellinger(const MixedMeasure& alpha, const MixedMeasure& beta, const HellingerConfig& cfg = {});

// Kind-level mutual absolute continuity.
bool mutually_continuous(const MarginalMeasure& a, const MarginalMeasure& b, double tol = 1e-12);

enum class KakutaniVerdict { Equivalent, Orthogonal, NonOrthogonal, Undecided };
std::string to_string(KakutaniVerdict v);

struct KakutaniConfig {
  HellingerConfig hellinger;
  SeriesConfig series;
  bool keep_per_n = true;
};

struct HellingerReport {
  std::vector<double> per_n;  // H_n for n = 0..horizon
  double deficit_sum = 0.0;
  KakutaniVerdict verdict = KakutaniVerdict::Undecided;
  std::optional<double> kappa_hat;  // sigma'/sigma scale for Gaussian pairs
  SeriesCertificate certificate;
  std::string rule;
  long horizon = 0;
  nlohmann::json evidence = nlohmann::json::object();
};

nlohmann::json to_json(const HellingerReport& r, bool with_per_n = false);

HellingerReport kakutani_decide(const InvariantProductMeasure& mu, const InvariantProductMeasure& mv,
                                long horizon, const KakutaniConfig& cfg = {});

struct GaussianEquivalence {
  Verdict exists_kappa;
  std::optional<double> kappa_hat;
  SeriesCertificate deficit;
  std::vector<double> deficit_partial_sums;  // n = 1..horizon
  // sigma = 1 for u and sigma' = kappa_hat for v, when established
  std::optional<std::pair<InvariantProductMeasure, InvariantProductMeasure>> witnesses;
};

GaussianEquivalence gaussian_equivalence_test(const WeightSpec& u, const WeightSpec& v, double p, long horizon,
                                              const SeriesConfig& cfg = {});

struct DiscreteMarginalResult {
  Verdict verdict;
  std::optional<MarginalMeasure> constructed_mu0_v;  // q(s) = p(lambda s)
};

DiscreteMarginalResult discrete_marginal_test(const WeightSpec& u, const WeightSpec& v, const MarginalMeasure& mu0_u,
                                              const MarginalMeasure& mu0_v, long horizon);

// Necessary conditions for non-orthogonality of translated product laws.
// With a second moment: sum alpha_n^2 < infinity; otherwise
// sum (alpha_n - alpha)^2 < infinity for some alpha.
Verdict translate_test(const std::function<double(long)>& alphas, bool has_second_moment, long horizon,
                       const SeriesConfig& cfg = {});

struct KakutaniWitness {
  long N = 0;
  double log_hellinger_product = 0.0;
  nlohmann::json E_descriptor;
  double est_mu_v_of_E = 0.0;
  double se_mu_v = 0.0;
  double est_mu_u_of_complement = 0.0;
  double se_mu_u = 0.0;
  bool certified = false;
};

nlohmann::json to_json(const KakutaniWitness& w);

// N <= 0 selects the first N with prod_{n<=N} H_n < epsilon, searching up to max_auto_n.
KakutaniWitness kakutani_witness(const InvariantProductMeasure& mu, const InvariantProductMeasure& mv, long N,
                                 double epsilon, long mc_samples, std::uint64_t seed, long max_auto_n = 100000,
                                 const HellingerConfig& cfg = {});

}  // namespace shiftlab
