#pragma once

#include <string>

#include <json.hpp>

namespace shiftlab {

enum class Status { Established, Refuted, Undecided };

enum class Rule {
  Summability,
  UnboundedProducts,
  DivergentProducts,
  ChaosSummability,
  InvariantMeasureSummability,
  OrbitCertificate,
  Similarity,
  WindowedRatio,
  ScalarPair,
  BoundedBelowDissimilar,
  SharedPeriodicPoint,
  GaussianEquivalence,
  KakutaniProduct,
  DiscreteMarginals,
  TranslateCriterion,
  DensityScaleRegime,
  LimitScale,
  EllOneSupport,
  NullSequenceSupport,
  FhcTransfer,
  EmpiricalWitness,
};

std::string to_string(Status s);
std::string to_string(Rule r);
Status status_from_string(const std::string& s);

struct Verdict {
  Status status = Status::Undecided;
  Rule rule = Rule::Summability;
  nlohmann::json evidence = nlohmann::json::object();
  long horizon = 0;

  bool established() const { return status == Status::Established; }
  bool refuted() const { return status == Status::Refuted; }
  bool undecided() const { return status == Status::Undecided; }
};

nlohmann::json to_json(const Verdict& v);

}  // namespace shiftlab
