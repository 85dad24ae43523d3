#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <variant>
#include <vector>

#include "shiftlab/verdict.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

struct Gaussian {
  double sigma = 1.0;
  int d = 1;  // complex: sigma^2 per real coordinate
};

struct UniformInterval {
  double a = 0.0;
  double b = 1.0;
};

struct DiscreteGroup {
  std::vector<std::complex<double>> support;
  std::vector<double> weights;
};

// Piecewise-linear density on the uniform grid lo + i*h, zero outside
// [lo, hi]. values[i] is the right limit at node i (the left limit at the
// last node); listed discontinuities carry their own left limit.
struct GridDensity {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;
  std::vector<std::pair<long, double>> left_limits;  // (node index, left value), sorted

  long cells() const { return static_cast<long>(values.size()) - 1; }
  double step() const { return (hi - lo) / static_cast<double>(cells()); }
  double node(long i) const { return lo + step() * static_cast<double>(i); }
  double left_at(long i) const;
  double right_at(long i) const;
  double eval(double t) const;
  double mass() const;

  // Rescales values so the mass is 1.
  static GridDensity normalized(double lo, double hi, std::vector<double> values,
                                std::vector<std::pair<long, double>> left_limits = {});
};

class MarginalMeasure {
 public:
  using Kind = std::variant<Gaussian, UniformInterval, DiscreteGroup, GridDensity>;

  MarginalMeasure(Kind k);  // validates
  static MarginalMeasure gaussian(double sigma, int d = 1) { return MarginalMeasure(Gaussian{sigma, d}); }
  static MarginalMeasure uniform(double a, double b) { return MarginalMeasure(UniformInterval{a, b}); }
  static MarginalMeasure discrete(std::vector<std::complex<double>> support, std::vector<double> weights);
  static MarginalMeasure grid(GridDensity g) { return MarginalMeasure(std::move(g)); }

  const Kind& kind() const { return kind_; }
  int field_dim() const;
  bool charges_zero() const { return false; }
  bool is_discrete() const { return std::holds_alternative<DiscreteGroup>(kind_); }
  std::string kind_name() const;

  // Density with respect to Lebesgue measure on the field (continuous kinds).
  double density(std::complex<double> t) const;
  double log_density(std::complex<double> t) const;
  // Support interval for real continuous kinds; Gaussian gives +-infinity.
  std::pair<double, double> support() const;
  // Points where a real density may jump.
  std::vector<double> breakpoints() const;

  double abs_moment(double p) const;
  // mu(|t| > x)
  double tail(double x) const;
  // log mu(|t| > exp(log_x)), -inf when zero
  double log_tail(double log_x) const;
  double total_mass() const;

  // Law of t * exp(log_factor) * e^{i phase}. Non-real factors need a
  // rotation-invariant (Gaussian) or discrete law.
  MarginalMeasure scaled(double log_factor, double phase = 0.0) const;
  MarginalMeasure scaled(const DD& log_factor, double phase = 0.0) const;

  std::complex<double> sample(std::mt19937_64& rng) const;

 private:
  Kind kind_;
  std::shared_ptr<const std::vector<double>> cdf_;  // discrete / grid sampling table
};

struct InvariantProductMeasure {
  MarginalMeasure mu0;
  WeightSpec spec;
  double p = 2.0;
};

MarginalMeasure marginal_at(const InvariantProductMeasure& m, long n);

struct MomentIdentity {
  double lhs_truncated = 0.0;
  double rhs_closed = 0.0;
  double tail_bound = 0.0;
};

MomentIdentity moment_identity(const InvariantProductMeasure& m, long horizon,
                               const WeightsConfig& cfg = {});

// First N whose certified lp tail of (1/(w_1...w_n)) is below tol.
long default_truncation(const WeightSpec& spec, double p, double tol = 1e-12,
                        const WeightsConfig& cfg = {});

// Draws truncated vectors from m; each draw owns an RNG stream (seed, index).
class ProductSampler {
 public:
  ProductSampler(const InvariantProductMeasure& m, long N, const WeightsConfig& cfg = {});

  std::vector<std::complex<double>> draw(std::uint64_t seed, std::uint64_t index = 0) const;
  LogVector draw_log(std::uint64_t seed, std::uint64_t index = 0) const;
  std::vector<std::complex<double>> draw_xi(std::uint64_t seed, std::uint64_t index = 0) const;
  long truncation() const { return N_; }
  const LogProductSeries& series() const { return series_; }
  const InvariantProductMeasure& measure() const { return m_; }

 private:
  InvariantProductMeasure m_;
  long N_;
  LogProductSeries series_;
};

std::vector<std::complex<double>> sample(const InvariantProductMeasure& m, long N, std::uint64_t seed);

// Law of omega * xi with omega uniform on the unimodular scalars.
MarginalMeasure symmetrize_phase(const MarginalMeasure& mu0, Field field = Field::Real);
// Phase randomization usable for every kind, including those without an
// exact symmetrized representation.
std::complex<double> sample_phase_randomized(const MarginalMeasure& mu0, Field field,
                                             std::mt19937_64& rng);

Verdict ell1_support_test(const MarginalMeasure& mu0, const WeightSpec& spec,
                          const EpsilonGenerator& epsilons, long horizon,
                          const SeriesConfig& cfg = {});

// Necessary condition: products not tending to infinity and mu0 != delta_0
// force m(c_0) = 0.
Verdict null_sequence_support_test(const MarginalMeasure& mu0, const WeightSpec& spec, long horizon);

}  // namespace shiftlab
