#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shiftlab/ratio.hpp"
#include "shiftlab/verdict.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

// log lambda_n = L^u_n - L^v_n for n = 0..horizon.
struct RatioSeries {
  std::vector<DD> lambdas_log;
  std::vector<double> phases;  // arg lambda_n, empty when both sides are positive
  long horizon() const { return static_cast<long>(lambdas_log.size()) - 1; }
  double log(long n) const { return lambdas_log.at(n).value(); }
};

RatioSeries ratio_series(const LogProductSeries& lu, const LogProductSeries& lv);

struct OrthoConfig {
  long horizon = 100000;
  double p = 2.0;
  double divergence_log = 30.0;  // exp(+-30) counts as 0 / infinity
  int epochs = 3;
  long n_window = 4;
  long d_max = 64;
  long m_check = 1000;
  double log_tol = 1e-12;  // floating fallback for the periodic identity
  LimitConfig limit;
};

Verdict similarity_test(const WeightSpec& u, const WeightSpec& v, long horizon, const OrthoConfig& cfg = {});

Verdict window_orthogonality_test(const WeightSpec& u, const WeightSpec& v, long n_window, long horizon,
                                  const OrthoConfig& cfg = {});

// Orthogonal iff |a| != |b|; equal moduli share a phase-symmetrized measure.
Verdict scalar_pair_test(const std::string& tag, const Scalar& a, const Scalar& b);

struct PeriodicWitness {
  long d = 1;
  long j = 0;
  Scalar C;
  long checked_m = 0;
  bool numeric = false;  // identity checked with a tolerance instead of exactly
  LogVector vector;      // sum_m e_{md+j} / (u_1...u_{md+j}), truncated
};

nlohmann::json to_json(const PeriodicWitness& w);

// Searches d = 1..d_max and j = 0..d-1 in that order.
std::optional<PeriodicWitness> shared_periodic_point(const WeightSpec& u, const WeightSpec& v, double p,
                                                     long d_max, long m_check, long horizon,
                                                     const OrthoConfig& cfg = {});

// Checks one candidate (d, j).
std::optional<PeriodicWitness> periodic_witness_at(const WeightSpec& u, const WeightSpec& v, double p, long d,
                                                   long j, long m_check, long horizon,
                                                   const OrthoConfig& cfg = {});

enum class OrthoSummary { Orthogonal, NotOrthogonal, Undecided };
std::string to_string(OrthoSummary s);

struct OrthogonalityReport {
  std::vector<Verdict> verdicts;
  OrthoSummary summary = OrthoSummary::Undecided;
  std::optional<PeriodicWitness> witness;
  std::optional<double> kappa_hat;
};

nlohmann::json to_json(const OrthogonalityReport& r);

OrthogonalityReport orthogonality_report(const WeightSpec& u, const WeightSpec& v, double p,
                                         const OrthoConfig& cfg = {});

}  // namespace shiftlab
