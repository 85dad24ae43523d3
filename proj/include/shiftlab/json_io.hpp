#pragma once

#include <json.hpp>

#include "shiftlab/weights.hpp"

namespace shiftlab {

class MarginalMeasure;

// Scalars accept 2, "1/3", [re, im] or {"re": .., "im": ..}.
nlohmann::json to_json(const Scalar& s);
Scalar scalar_from_json(const nlohmann::json& j);

nlohmann::json to_json(const WeightSpec& spec);
WeightSpec weight_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MarginalMeasure& m);
MarginalMeasure marginal_from_json(const nlohmann::json& j);

}  // namespace shiftlab
