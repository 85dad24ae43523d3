#include "shiftlab/json_io.hpp"

#include "shiftlab/errors.hpp"
#include "shiftlab/measures.hpp"

namespace shiftlab {

using nlohmann::json;

namespace {

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  return j.get<double>();
}

long integer(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ConfigError(std::string(what) + " must be an integer");
  return j.get<long>();
}

Field field_of(const json& j) {
  if (!j.contains("field")) return Field::Real;
  const auto& f = j.at("field");
  if (f == "real") return Field::Real;
  if (f == "complex") return Field::Complex;
  throw ConfigError("field must be \"real\" or \"complex\"");
}

json epsilon_json(const EpsilonGenerator& e) {
  switch (e.form) {
    case EpsilonGenerator::Form::Power: return {{"form", "power"}, {"c", e.c}, {"s", e.s}};
    case EpsilonGenerator::Form::Geometric: return {{"form", "geometric"}, {"c", e.c}, {"r", e.r}};
    case EpsilonGenerator::Form::List: return {{"form", "list"}, {"values", e.list}};
  }
  return {};
}

EpsilonGenerator epsilon_from_json(const json& j) {
  EpsilonGenerator e;
  const auto& form = need(j, "form");
  if (form == "power") {
    e.form = EpsilonGenerator::Form::Power;
    e.c = j.contains("c") ? number(j.at("c"), "epsilon c") : 1.0;
    e.s = number(need(j, "s"), "epsilon s");
  } else if (form == "geometric") {
    e.form = EpsilonGenerator::Form::Geometric;
    e.c = j.contains("c") ? number(j.at("c"), "epsilon c") : 1.0;
    e.r = number(need(j, "r"), "epsilon r");
  } else if (form == "list") {
    e.form = EpsilonGenerator::Form::List;
    for (const auto& v : need(j, "values")) e.list.push_back(number(v, "epsilon value"));
  } else {
    throw ConfigError("unknown epsilon form");
  }
  if (e.c < 0) throw ConfigError("epsilon sequence must be nonnegative");
  for (double v : e.list)
    if (v < 0) throw ConfigError("epsilon sequence must be nonnegative");
  return e;
}

json schedule_json(const ExceptionSchedule& ex) {
  if (ex.kind == ExceptionSchedule::Kind::List) {
    json list = json::array();
    for (const auto& [n, v] : ex.list) list.push_back(json::array({n, to_json(v)}));
    return {{"positions", "list"}, {"list", list}};
  }
  json value = {{"law", ex.law == ExceptionSchedule::Law::Reciprocal ? "reciprocal" : "constant"},
                {"c", to_json(ex.c)}};
  return {{"positions", "formula"},
          {"params",
           {{"scale", ex.scale}, {"ratio", ex.ratio}, {"k0", ex.k0}, {"offsets", ex.offsets}, {"value", value}}}};
}

ExceptionSchedule schedule_from_json(const json& j) {
  ExceptionSchedule ex;
  const auto& pos = need(j, "positions");
  if (pos == "list") {
    ex.kind = ExceptionSchedule::Kind::List;
    for (const auto& e : need(j, "list")) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("exception list entries are [position, value]");
      ex.list.emplace_back(integer(e[0], "exception position"), scalar_from_json(e[1]));
    }
  } else if (pos == "formula") {
    ex.kind = ExceptionSchedule::Kind::Formula;
    const auto& p = need(j, "params");
    if (p.contains("scale")) ex.scale = integer(p.at("scale"), "scale");
    if (p.contains("ratio")) ex.ratio = integer(p.at("ratio"), "ratio");
    if (p.contains("k0")) ex.k0 = integer(p.at("k0"), "k0");
    for (const auto& o : need(p, "offsets")) ex.offsets.push_back(integer(o, "offset"));
    if (p.contains("value")) {
      const auto& v = p.at("value");
      const auto& law = need(v, "law");
      if (law == "reciprocal")
        ex.law = ExceptionSchedule::Law::Reciprocal;
      else if (law == "constant")
        ex.law = ExceptionSchedule::Law::Constant;
      else
        throw ConfigError("exception law must be \"reciprocal\" or \"constant\"");
      if (v.contains("c")) ex.c = scalar_from_json(v.at("c"));
    }
  } else {
    throw ConfigError("exception positions must be \"formula\" or \"list\"");
  }
  return ex;
}

}  // namespace

json to_json(const Scalar& s) {
  if (s.exact) {
    if (s.exact->den == 1) return s.exact->num;
    return s.exact->str();
  }
  if (s.is_real()) return s.value.real();
  return json::array({s.value.real(), s.value.imag()});
}

Scalar scalar_from_json(const json& j) {
  if (j.is_number_integer()) return Scalar::rational(Rational::integer(j.get<std::int64_t>()));
  if (j.is_number()) return Scalar::real(j.get<double>());
  if (j.is_string()) {
    auto r = Rational::parse(j.get<std::string>());
    if (!r) throw ConfigError("cannot parse scalar \"" + j.get<std::string>() + "\"");
    return Scalar::rational(*r);
  }
  if (j.is_array() && j.size() == 2)
    return Scalar::complex({number(j[0], "real part"), number(j[1], "imaginary part")});
  if (j.is_object() && j.contains("re"))
    return Scalar::complex({number(j.at("re"), "re"), j.contains("im") ? number(j.at("im"), "im") : 0.0});
  throw ConfigError("scalar must be a number, \"p/q\", [re, im] or {re, im}");
}

json to_json(const WeightSpec& spec) {
  json j = std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, WeightSpec::Constant>) {
          return {{"kind", "constant"}, {"c", to_json(k.c)}};
        } else if constexpr (std::is_same_v<K, WeightSpec::Scaled>) {
          return {{"kind", "scaled"}, {"a", to_json(k.a)}, {"base", to_json(*k.base)}};
        } else if constexpr (std::is_same_v<K, WeightSpec::Prefix>) {
          json pre = json::array();
          for (const auto& s : k.prefix) pre.push_back(to_json(s));
          return {{"kind", "prefix"}, {"prefix", pre}, {"tail", to_json(k.tail)}};
        } else if constexpr (std::is_same_v<K, WeightSpec::Sparse>) {
          return {{"kind", "sparse"}, {"base", to_json(k.base)}, {"exceptions", schedule_json(k.exceptions)}};
        } else {
          return {{"kind", "ratio"}, {"base", to_json(k.base)}, {"epsilon", epsilon_json(k.eps)}};
        }
      },
      spec.kind());
  j["field"] = spec.field() == Field::Real ? "real" : "complex";
  return j;
}

WeightSpec weight_spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("weight spec must be an object");
  const Field f = field_of(j);
  const auto& kind = need(j, "kind");
  try {
    if (kind == "constant") return WeightSpec::constant(scalar_from_json(need(j, "c")), f);
    if (kind == "scaled") {
      WeightSpec base = weight_spec_from_json(need(j, "base"));
      WeightSpec out = WeightSpec::scaled(scalar_from_json(need(j, "a")), base);
      return j.contains("field") ? out.with_field(f) : out;
    }
    if (kind == "prefix") {
      std::vector<Scalar> pre;
      for (const auto& s : need(j, "prefix")) pre.push_back(scalar_from_json(s));
      return WeightSpec::prefix(std::move(pre), scalar_from_json(need(j, "tail")), f);
    }
    if (kind == "sparse")
      return WeightSpec::sparse(scalar_from_json(need(j, "base")), schedule_from_json(need(j, "exceptions")), f);
    if (kind == "ratio")
      return WeightSpec::ratio(scalar_from_json(need(j, "base")), epsilon_from_json(need(j, "epsilon")), f);
  } catch (const InvalidWeight& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown weight kind");
}

json to_json(const MarginalMeasure& m) {
  return std::visit(
      [](const auto& k) -> json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Gaussian>) {
          return {{"kind", "gaussian"}, {"sigma", k.sigma}, {"d", k.d}};
        } else if constexpr (std::is_same_v<K, UniformInterval>) {
          return {{"kind", "uniform"}, {"a", k.a}, {"b", k.b}};
        } else if constexpr (std::is_same_v<K, DiscreteGroup>) {
          json sup = json::array();
          for (auto s : k.support) {
            if (s.imag() == 0.0)
              sup.push_back(s.real());
            else
              sup.push_back(json::array({s.real(), s.imag()}));
          }
          return {{"kind", "discrete"}, {"support", sup}, {"weights", k.weights}};
        } else {
          json disc = json::array();
          for (const auto& [i, left] : k.left_limits) disc.push_back({{"at", i}, {"left", left}});
          return {{"kind", "grid"}, {"lo", k.lo}, {"hi", k.hi}, {"values", k.values}, {"discontinuities", disc}};
        }
      },
      m.kind());
}

MarginalMeasure marginal_from_json(const json& j) {
  const auto& kind = need(j, "kind");
  try {
    if (kind == "gaussian") {
      int d = j.contains("d") ? static_cast<int>(integer(j.at("d"), "d")) : 1;
      return MarginalMeasure::gaussian(number(need(j, "sigma"), "sigma"), d);
    }
    if (kind == "uniform") return MarginalMeasure::uniform(number(need(j, "a"), "a"), number(need(j, "b"), "b"));
    if (kind == "discrete") {
      std::vector<std::complex<double>> sup;
      std::vector<double> w;
      for (const auto& s : need(j, "support")) sup.push_back(scalar_from_json(s).value);
      for (const auto& x : need(j, "weights")) w.push_back(number(x, "weight"));
      return MarginalMeasure::discrete(std::move(sup), std::move(w));
    }
    if (kind == "grid") {
      std::vector<double> values;
      for (const auto& x : need(j, "values")) values.push_back(number(x, "grid value"));
      std::vector<std::pair<long, double>> left;
      if (j.contains("discontinuities"))
        for (const auto& d : j.at("discontinuities"))
          left.emplace_back(integer(need(d, "at"), "at"), number(need(d, "left"), "left"));
      double lo = number(need(j, "lo"), "lo"), hi = number(need(j, "hi"), "hi");
      if (j.value("normalize", false))
        return MarginalMeasure::grid(GridDensity::normalized(lo, hi, std::move(values), std::move(left)));
      return MarginalMeasure::grid(GridDensity{lo, hi, std::move(values), std::move(left)});
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  } catch (const SupportContainsZero& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown marginal kind");
}

}  // namespace shiftlab
