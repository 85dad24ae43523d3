#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shiftlab/measures.hpp"
#include "shiftlab/verdict.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

LogVector shift_power(const WeightSpec& spec, const LogVector& x, long n);
std::vector<std::complex<double>> shift_power(const WeightSpec& spec, const std::vector<std::complex<double>>& x,
                                              long n);

struct Region {
  enum class Kind { Ball, HalfSpace, Kernel };
  Kind kind = Kind::Ball;
  std::string label;
  std::vector<std::complex<double>> center;  // Ball
  double radius = 1.0;                       // Ball
  double gamma = 0.0;                        // HalfSpace: |z_0| > gamma; Kernel: |z_0| >= gamma
  double M = 1.0;                            // Kernel: ||z|| <= M

  static Region ball(std::vector<std::complex<double>> center, double radius, std::string label = "ball");
  static Region half_space(double gamma, std::string label = "halfspace");
  static Region kernel(double M, double gamma, std::string label = "kernel");
  // closure of the region misses 0
  bool excludes_zero(double p) const;
};

// The orbit of a truncated vector, with log|x_k| + L_k cached so each
// coordinate of B_w^n x costs one exponential.
class Orbit {
 public:
  Orbit(const LogProductSeries& s, const LogVector& x);
  long size(long n) const { return std::max(0L, len_ - n); }
  std::complex<double> coord(long n, long j) const;
  double coord0_abs(long n) const { return std::abs(coord(n, 0)); }
  double log_norm(long n, double p) const;
  // Conservative membership: the truncation tail bound counts against the hit.
  bool in(long n, const Region& r, double p, double tail_bound = 0.0) const;

 private:
  long len_ = 0;
  std::vector<double> anchored_, anchored_phase_, logs_, phases_;
  bool real_ = true;
};

struct OrbitTrace {
  struct Entry {
    long n = 0;
    double log_norm = 0.0;
    double coord0_abs = 0.0;
  };
  std::vector<Entry> entries;
  std::map<std::string, std::vector<long>> visit_sets;
  long horizon = 0;

  // columns n, log_norm, coord0_abs, one 0/1 column per region
  std::string to_csv() const;
};

OrbitTrace orbit_trace(const WeightSpec& spec, const LogVector& x, const std::vector<Region>& regions, long horizon,
                       double p = 2.0, double tail_bound = 0.0);

struct VisitDensity {
  std::vector<long> hits;
  double lower_density_estimate = 0.0;
  double upper_density_estimate = 0.0;
  std::vector<long> prefixes;  // dyadic N used for the estimates
};

// Densities are the min and max of #hits in [0, N] / (N + 1) over the prefixes
// N = 2^k - 1 in [(horizon + 1) / 64, horizon], plus N = horizon.
VisitDensity visit_density(const WeightSpec& spec, const LogVector& x, const Region& region, long horizon,
                           double p = 2.0, double tail_bound = 0.0);

struct WitnessConfig {
  long mc_samples = 10000;
  double epsilon = 0.1;
  long horizon = 200;
  long window = 64;  // coordinates kept beyond the horizon
  std::uint64_t seed = 1;
};

struct EmpiricalWitness {
  long n_star = 0;
  double est_joint_pullback = 0.0;  // under m_u
  double se = 0.0;
  double est_joint_pullback_v = 0.0;  // under m_v
  double se_v = 0.0;
  std::vector<double> q_curve;  // q_n under m_u for n = 0..n_star
};

nlohmann::json to_json(const EmpiricalWitness& w);

// Fraction of samples x ~ m with B_u^n x and B_v^n x both in K.
std::pair<double, double> joint_pullback_estimate(const WeightSpec& u, const WeightSpec& v,
                                                  const InvariantProductMeasure& m, const Region& K, long n,
                                                  long samples, std::uint64_t seed, long window = 64);

EmpiricalWitness empirical_orthogonality_witness(const WeightSpec& u, const WeightSpec& v,
                                                 const InvariantProductMeasure& m_u,
                                                 const InvariantProductMeasure& m_v, const Region& K,
                                                 const WitnessConfig& cfg = {});

struct FhcTransfer {
  double K_hat = 1.0;
  double log_K_hat = 0.0;
  std::optional<double> a_hat;
  Verdict converged;
};

nlohmann::json to_json(const FhcTransfer& f);

FhcTransfer fhc_transfer_constant(const WeightSpec& u, const WeightSpec& v, long horizon);

}  // namespace shiftlab
