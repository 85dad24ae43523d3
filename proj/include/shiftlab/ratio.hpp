#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shiftlab/weights.hpp"

namespace shiftlab {

// Symbolic shape of log lambda_n = L^u_n - L^v_n.
struct RatioForm {
  enum class Kind {
    EventuallyConstant,  // constant for n >= from
    Convergent,          // constant plus vanishing epsilon corrections
    BoundedOscillating,  // stays in a band, no limit
    Drift,               // tends to sign * infinity
    Oscillating,         // unbounded, returns to a fixed level infinitely often
    Unknown
  };
  Kind kind = Kind::Unknown;
  int sign = 0;
  long from = 0;
  bool liminf_zero = false;  // lambda_n -> 0 along a subsequence
  bool limsup_inf = false;   // lambda_n -> infinity along a subsequence
  std::optional<EpsilonGenerator> eps_u, eps_v;
  std::string reason;

  // log(1 + eps^u_n) - log(1 + eps^v_n): the vanishing part of log lambda_n.
  double correction(long n) const;
};

std::string to_string(RatioForm::Kind k);

RatioForm ratio_form(const WeightSpec& u, const WeightSpec& v);

// lambda_n as exact fractions while they fit; nullopt from the first overflow on.
std::vector<std::optional<Rational>> exact_ratios(const WeightSpec& u, const WeightSpec& v, long N);

struct RatioLimit {
  Status status = Status::Undecided;
  double log_limit = 0.0;  // log |lim lambda_n|
  std::string rule;
  nlohmann::json evidence = nlohmann::json::object();
};

struct LimitConfig {
  double window_fraction = 0.25;
  double stability = 1e-6;  // tail std must stay below stability * (1 + |mean|)
  double divergence_log = 30.0;
};

// Limit of |lambda_n| in (0, infinity), symbolically when the specs allow it,
// else from tail stabilization.
RatioLimit ratio_limit(const LogProductSeries& lu, const LogProductSeries& lv,
                       const LimitConfig& cfg = {});

}  // namespace shiftlab
