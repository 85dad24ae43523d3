#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "shiftlab/measures.hpp"
#include "shiftlab/quadrature.hpp"
#include "shiftlab/verdict.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

enum class SmoothClass { W12, PiecewiseC1, Unknown };
std::string to_string(SmoothClass s);

struct Jump {
  double at = 0.0;
  double left = 0.0;   // h(at-)
  double right = 0.0;  // h(at+)
};

// A nonnegative square-integrable function on the line, typically the square
// root of a probability density, with its discontinuities listed.
struct DensityProfile {
  std::function<double(double)> f;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::vector<Jump> jumps;         // sorted by position
  std::vector<double> breakpoints; // kinks; jumps are added automatically
  SmoothClass smooth_class = SmoothClass::Unknown;

  double operator()(double x) const { return (x < lo || x > hi) ? 0.0 : f(x); }
  bool empty() const { return !(lo < hi); }
  // Support cut where the profile falls below 1e-16.
  std::pair<double, double> effective_support() const;
  std::vector<double> all_breakpoints() const;
  double norm2(const QuadratureConfig& cfg = {}) const;

  static DensityProfile gaussian(double sigma = 1.0);
  static DensityProfile uniform(double a, double b);
  // sqrt of the density of a continuous real law
  static DensityProfile from_measure(const MarginalMeasure& m);
};

// Ph(alpha) = integral of h(x) h(x + alpha)
double acf(const DensityProfile& h, double alpha, const QuadratureConfig& cfg = {});
// sqrt(lambda) * integral of f(t) f(lambda t)
double theta(const DensityProfile& f, double lambda, const QuadratureConfig& cfg = {});
// sqrt(lambda) * integral of f(lambda t) g(t)
double psi(const DensityProfile& f, const DensityProfile& g, double lambda, const QuadratureConfig& cfg = {});

// h_+(x) = f(e^x) e^{x/2}, h_-(x) = f(-e^x) e^{x/2}
std::pair<DensityProfile, DensityProfile> log_substitution(const DensityProfile& f);

struct Slopes {
  double right_slope = 0.0;
  double left_slope = 0.0;
  double jump_formula_value = 0.0;  // -1/2 sum of squared jumps
};

Slopes one_sided_slopes(const DensityProfile& h, const QuadratureConfig& cfg = {});

// Non-orthogonality of the product measures built on p = f^2 and q(t) = a p(a t),
// decided by the quadratic (no jumps) or linear (jumps) deficit criterion.
Verdict equivalence_regime(const DensityProfile& f, const WeightSpec& u, const WeightSpec& v, double a, long horizon,
                           const SeriesConfig& cfg = {});

struct LimitScale {
  Verdict a_hat;
  std::optional<double> a;
  double density_match = std::numeric_limits<double>::infinity();  // sup |q(t) - a p(a t)|
};

LimitScale limit_scale_detect(const WeightSpec& u, const WeightSpec& v, const DensityProfile& f,
                              const DensityProfile& g, long horizon);

}  // namespace shiftlab
