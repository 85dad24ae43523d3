#pragma once

#include <span>
#include <string>

namespace shiftlab {

enum class SeriesStatus { Converges, Diverges, Undecided };

std::string to_string(SeriesStatus s);

struct SeriesConfig {
  double window_fraction = 0.25;  // trailing window used by every rule
  double ratio_bound = 0.999;     // geometric domination: t_n / t_{n-1} <= q
  double pseries_excess = 0.1;    // p-series domination with exponent 1 + excess
  double harmonic_floor = 1e-12;  // n * t_n must stay above this to claim divergence
  double nonvanishing_floor = 1e-3;
  long min_window = 8;
};

struct SeriesCertificate {
  SeriesStatus status = SeriesStatus::Undecided;
  double partial_sum = 0.0;
  double tail_bound = -1.0;  // negative when no bound is available
  std::string rule = "none";
};

// Certify convergence or divergence of sum t_n from finitely many nonnegative
// terms. terms[k] is t_{first_index + k}; first_index must be >= 1.
SeriesCertificate certify_series(std::span<const double> terms, long first_index,
                                 const SeriesConfig& cfg = {});

// Neumaier compensated summation.
double compensated_sum(std::span<const double> terms);

}  // namespace shiftlab
