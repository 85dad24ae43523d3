#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "shiftlab/measures.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab::testing {

inline WeightSpec ratio_power(double base, double c, double s) {
  EpsilonGenerator e;
  e.form = EpsilonGenerator::Form::Power;
  e.c = c;
  e.s = s;
  return WeightSpec::ratio(Scalar::real(base), e);
}

inline WeightSpec sparse_pair_side(std::vector<long> offsets) {
  ExceptionSchedule ex;
  ex.kind = ExceptionSchedule::Kind::Formula;
  ex.scale = 5;
  ex.ratio = 4;
  ex.k0 = 1;
  ex.offsets = std::move(offsets);
  ex.law = ExceptionSchedule::Law::Reciprocal;
  ex.c = Scalar::real(1.0);
  return WeightSpec::sparse(Scalar::real(2.0), ex);
}

inline WeightSpec scaled_unit(double a) { return WeightSpec::scaled(Scalar::real(a), WeightSpec::constant(Scalar::real(1.0))); }

// Seeded corpus covering every spec kind, moduli on both sides of 1.
inline std::vector<WeightSpec> fuzz_corpus(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mod(0.4, 3.0);
  std::uniform_int_distribution<int> kind(0, 5);
  std::vector<WeightSpec> out;
  while (out.size() < count) {
    double m = std::round(mod(rng) * 8) / 8;
    switch (kind(rng)) {
      case 0:
        out.push_back(WeightSpec::constant(Scalar::real(rng() % 2 ? m : -m)));
        break;
      case 1:
        out.push_back(WeightSpec::constant(Scalar::complex(std::polar(m, 0.7)), Field::Complex));
        break;
      case 2: {
        std::vector<Scalar> pre;
        for (int i = 0, len = 1 + static_cast<int>(rng() % 4); i < len; ++i) pre.push_back(Scalar::real(mod(rng)));
        out.push_back(WeightSpec::prefix(pre, Scalar::real(m)));
        break;
      }
      case 3:
        out.push_back(WeightSpec::scaled(Scalar::real(m), WeightSpec::constant(Scalar::real(mod(rng)))));
        break;
      case 4:
        out.push_back(ratio_power(m, mod(rng), 0.5 + static_cast<double>(rng() % 4) / 2));
        break;
      default: {
        ExceptionSchedule ex;
        ex.scale = 3;
        ex.ratio = 2 + static_cast<long>(rng() % 3);
        ex.k0 = 1;
        ex.offsets = {1};
        ex.law = rng() % 2 ? ExceptionSchedule::Law::Reciprocal : ExceptionSchedule::Law::Constant;
        ex.c = Scalar::real(0.5);
        out.push_back(WeightSpec::sparse(Scalar::real(m), ex));
      }
    }
  }
  return out;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

// Asymptotic 1% critical value of the two-sample statistic.
inline double ks_critical_1pct(std::size_t n, std::size_t m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / static_cast<double>(n * m));
}

}  // namespace shiftlab::testing
