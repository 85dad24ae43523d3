#pragma once

#include <functional>
#include <vector>

namespace shiftlab {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  long max_subintervals = 1000000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long subintervals = 0;
};

// Globally adaptive 15-point Gauss-Kronrod bisection over [a, b]; either end
// may be infinite. Interior breakpoints split the range before refinement.
// Throws QuadratureFailure when the tolerance is not met within the cap.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const std::vector<double>& breakpoints = {},
                           const QuadratureConfig& cfg = {});

}  // namespace shiftlab
