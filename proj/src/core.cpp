#include <cmath>
#include <cstdlib>

#include "shiftlab/errors.hpp"
#include "shiftlab/rational.hpp"
#include "shiftlab/verdict.hpp"

namespace shiftlab {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

constexpr __int128 kMax = static_cast<__int128>(INT64_MAX);

}  // namespace

std::optional<Rational> Rational::make(__int128 n, __int128 d) {
  if (d == 0) return std::nullopt;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n > kMax || n < -kMax || d > kMax) return std::nullopt;
  return Rational{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
}

std::optional<Rational> Rational::from_double(double x) {
  if (!std::isfinite(x)) return std::nullopt;
  if (x == 0.0) return Rational{0, 1};
  int e = 0;
  double m = std::frexp(x, &e);  // x = m * 2^e, 0.5 <= |m| < 1
  // 53-bit integer mantissa
  auto mant = static_cast<__int128>(std::ldexp(m, 53));
  e -= 53;
  if (e >= 0) {
    if (e > 62) return std::nullopt;
    __int128 v = mant << e;
    return make(v, 1);
  }
  while (e < 0 && (mant % 2) == 0) {
    mant /= 2;
    ++e;
  }
  if (-e > 62) return std::nullopt;
  return make(mant, static_cast<__int128>(1) << (-e));
}

std::optional<Rational> Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      long long a = std::stoll(s.substr(0, slash));
      long long b = std::stoll(s.substr(slash + 1));
      return make(a, b);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos && s.find_first_of("eE") == std::string::npos)
      return make(std::stoll(s), 1);
    if (s.find_first_of("eE") == std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      long decimals = static_cast<long>(s.size() - dot - 1);
      if (decimals > 18) return std::nullopt;
      __int128 den = 1;
      for (long i = 0; i < decimals; ++i) den *= 10;
      return make(std::stoll(digits), den);
    }
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return from_double(std::stod(s));
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

std::optional<Rational> mul(const Rational& a, const Rational& b) {
  return Rational::make(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}

std::optional<Rational> div(const Rational& a, const Rational& b) {
  if (b.num == 0) return std::nullopt;
  return Rational::make(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num);
}

std::optional<Rational> add(const Rational& a, const Rational& b) {
  return Rational::make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                        static_cast<__int128>(a.den) * b.den);
}

std::optional<Rational> pow(const Rational& a, int e) {
  std::optional<Rational> r = Rational{1, 1};
  Rational base = a;
  if (e < 0) {
    auto inv = div(Rational{1, 1}, a);
    if (!inv) return std::nullopt;
    base = *inv;
    e = -e;
  }
  for (int i = 0; i < e && r; ++i) r = mul(*r, base);
  return r;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Established: return "Established";
    case Status::Refuted: return "Refuted";
    case Status::Undecided: return "Undecided";
  }
  return "Undecided";
}

Status status_from_string(const std::string& s) {
  if (s == "Established") return Status::Established;
  if (s == "Refuted") return Status::Refuted;
  return Status::Undecided;
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::Summability: return "summability";
    case Rule::UnboundedProducts: return "unbounded-products";
    case Rule::DivergentProducts: return "divergent-products";
    case Rule::ChaosSummability: return "chaos-summability";
    case Rule::InvariantMeasureSummability: return "invariant-measure-summability";
    case Rule::OrbitCertificate: return "orbit-certificate";
    case Rule::Similarity: return "similarity";
    case Rule::WindowedRatio: return "windowed-ratio";
    case Rule::ScalarPair: return "scalar-pair";
    case Rule::BoundedBelowDissimilar: return "bounded-below-dissimilar";
    case Rule::SharedPeriodicPoint: return "shared-periodic-point";
    case Rule::GaussianEquivalence: return "gaussian-equivalence";
    case Rule::KakutaniProduct: return "kakutani-product";
    case Rule::DiscreteMarginals: return "discrete-marginals";
    case Rule::TranslateCriterion: return "translate-criterion";
    case Rule::DensityScaleRegime: return "density-scale-regime";
    case Rule::LimitScale: return "limit-scale";
    case Rule::EllOneSupport: return "ell1-support";
    case Rule::NullSequenceSupport: return "null-sequence-support";
    case Rule::FhcTransfer: return "fhc-transfer";
    case Rule::EmpiricalWitness: return "empirical-witness";
  }
  return "unknown";
}

nlohmann::json to_json(const Verdict& v) {
  return {{"status", to_string(v.status)},
          {"rule", to_string(v.rule)},
          {"horizon", v.horizon},
          {"evidence", v.evidence}};
}

}  // namespace shiftlab
