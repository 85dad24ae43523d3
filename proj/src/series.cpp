#include "shiftlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace shiftlab {

std::string to_string(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::Converges: return "Converges";
    case SeriesStatus::Diverges: return "Diverges";
    case SeriesStatus::Undecided: return "Undecided";
  }
  return "Undecided";
}

double compensated_sum(std::span<const double> terms) {
  double s = 0.0, c = 0.0;
  for (double t : terms) {
    double u = s + t;
    if (std::abs(s) >= std::abs(t))
      c += (s - u) + t;
    else
      c += (t - u) + s;
    s = u;
  }
  return s + c;
}

SeriesCertificate certify_series(std::span<const double> terms, long first_index,
                                 const SeriesConfig& cfg) {
  SeriesCertificate out;
  out.partial_sum = compensated_sum(terms);
  const long count = static_cast<long>(terms.size());
  if (!std::isfinite(out.partial_sum)) {
    out.status = SeriesStatus::Diverges;
    out.rule = "overflow";
    return out;
  }
  long w = std::max<long>(cfg.min_window,
                          static_cast<long>(std::floor(cfg.window_fraction * count)));
  if (count < 2 * cfg.min_window || w > count) return out;
  const long start = count - w;
  auto n_of = [&](long k) { return static_cast<double>(first_index + k); };

  // Vanishing tail: nothing left to sum.
  bool all_zero = true;
  for (long k = start; k < count; ++k)
    if (terms[k] != 0.0) all_zero = false;
  if (all_zero) {
    out.status = SeriesStatus::Converges;
    out.tail_bound = 0.0;
    out.rule = "zero-tail";
    return out;
  }

  const long mid = start + w / 2;
  // min/max of f over the two halves of the trailing window
  auto halves = [&](auto f, bool take_max) {
    double a = take_max ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
    double b = a;
    for (long k = start; k < count; ++k) {
      double v = f(k);
      double& slot = k < mid ? a : b;
      slot = take_max ? std::max(slot, v) : std::min(slot, v);
    }
    return std::pair{a, b};
  };
  constexpr double kSlack = 1e-9;

  auto [t_early, t_late] = halves([&](long k) { return terms[k]; }, false);
  if (std::min(t_early, t_late) >= cfg.nonvanishing_floor && t_late >= t_early * (1 - kSlack)) {
    out.status = SeriesStatus::Diverges;
    out.rule = "terms-do-not-vanish";
    return out;
  }

  // Geometric domination over the trailing window.
  double q = 0.0;
  bool ratio_ok = true;
  for (long k = std::max<long>(start, 1); k < count; ++k) {
    if (terms[k - 1] <= 0.0) {
      if (terms[k] > 0.0) ratio_ok = false;
      continue;
    }
    q = std::max(q, terms[k] / terms[k - 1]);
  }
  if (ratio_ok && q <= cfg.ratio_bound) {
    out.status = SeriesStatus::Converges;
    out.tail_bound = terms[count - 1] * q / (1.0 - q);
    out.rule = "geometric-ratio";
    return out;
  }

  // p-series domination: n^s t_n must not grow across the window.
  const double s = 1.0 + cfg.pseries_excess;
  auto [g_early, g_late] =
      halves([&](long k) { return std::pow(n_of(k), s) * terms[k]; }, true);
  if (g_late <= g_early * (1 + kSlack)) {
    out.status = SeriesStatus::Converges;
    out.tail_bound = g_late * std::pow(n_of(count - 1), -cfg.pseries_excess) / cfg.pseries_excess;
    out.rule = "p-series";
    return out;
  }

  // Harmonic minorant: n t_n bounded below and not decaying.
  auto [h_early, h_late] = halves([&](long k) { return n_of(k) * terms[k]; }, false);
  if (h_late >= cfg.harmonic_floor && h_late >= h_early * (1 - kSlack)) {
    out.status = SeriesStatus::Diverges;
    out.rule = "harmonic-minorant";
    return out;
  }
  return out;
}

}  // namespace shiftlab
