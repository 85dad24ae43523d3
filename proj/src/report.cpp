#include "shiftlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shiftlab/errors.hpp"
#include "shiftlab/hellinger.hpp"
#include "shiftlab/json_io.hpp"
#include "shiftlab/orthocheck.hpp"

namespace shiftlab {

using nlohmann::json;

namespace {

const std::set<std::string> kCompareModules = {"similarity",  "window",           "periodic",    "gaussian_equivalence",
                                               "kakutani",    "empirical_witness", "fhc_transfer"};
const std::set<std::string> kCurveModules = {"acf", "theta", "hellinger"};

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

long integer(const json& j, const char* key, long fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return j.at(key).get<long>();
}

Grid1D grid_from_json(const json& j, const char* what) {
  if (j.is_array()) {
    Grid1D g;
    for (const auto& x : j) {
      if (!x.is_number()) throw ConfigError(std::string(what) + " values must be numbers");
      g.points.push_back(x.get<double>());
    }
    return g;
  }
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a list or {from, to, count}");
  return Grid1D::linspace(num(j, "from", 0.0), num(j, "to", 1.0), integer(j, "count", 2));
}

DensityProfile profile_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("profile must be an object with a kind");
  if (j.at("kind") == "gaussian") return DensityProfile::gaussian(num(j, "sigma", 1.0));
  if (j.at("kind") == "uniform") return DensityProfile::uniform(num(j, "a", 0.0), num(j, "b", 1.0));
  try {
    return DensityProfile::from_measure(marginal_from_json(j));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
}

Region region_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("witness_region must be an object");
  std::string kind = j.value("kind", "ball");
  try {
    if (kind == "ball") {
      std::vector<std::complex<double>> c;
      for (const auto& z : j.at("center")) c.push_back(scalar_from_json(z).value);
      return Region::ball(std::move(c), num(j, "radius", 1.0), "K");
    }
    if (kind == "kernel") return Region::kernel(num(j, "M", 1.0), num(j, "gamma", 1.0), "K");
    if (kind == "halfspace") return Region::half_space(num(j, "gamma", 1.0), "K");
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("witness_region: ") + e.what());
  }
  throw ConfigError("witness_region kind must be ball, kernel or halfspace");
}

void write_file(const std::string& dir, const std::string& name, const std::string& content, RunResult& res) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path);
  os << content;
  res.files.push_back(path);
}

bool enabled(const ExperimentConfig& cfg, const std::string& m) { return !cfg.modules || cfg.modules->count(m) > 0; }

const WeightSpec& need_spec(const std::optional<WeightSpec>& s, const char* what) {
  if (!s) throw ConfigError(std::string("config needs weight spec \"") + what + "\"");
  return *s;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

Grid1D Grid1D::linspace(double from, double to, long count) {
  if (count < 1) throw ConfigError("grid needs at least one point");
  Grid1D g;
  for (long i = 0; i < count; ++i)
    g.points.push_back(count == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1));
  return g;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    c.name = j.value("name", "");
    if (j.contains("u")) c.u = weight_spec_from_json(j.at("u"));
    if (j.contains("spec")) c.u = weight_spec_from_json(j.at("spec"));
    if (j.contains("v")) c.v = weight_spec_from_json(j.at("v"));
    c.p = num(j, "p", 2.0);
    if (!(c.p >= 1.0)) throw ConfigError("p must be >= 1");
    c.horizon = integer(j, "horizon", c.horizon);
    if (c.horizon < 1) throw ConfigError("horizon must be >= 1");
    if (j.contains("modules")) {
      std::set<std::string> m;
      for (const auto& x : j.at("modules")) m.insert(x.get<std::string>());
      c.modules = m;
    }
    if (j.contains("marginals")) {
      const json& mj = j.at("marginals");
      if (mj.contains("u")) c.mu0_u = marginal_from_json(mj.at("u"));
      if (mj.contains("v")) c.mu0_v = marginal_from_json(mj.at("v"));
    }
    if (j.contains("marginal")) c.mu0_u = c.mu0_v = marginal_from_json(j.at("marginal"));
    if (j.contains("seed")) {
      const json& sd = j.at("seed");
      if (!sd.is_number_unsigned() && !(sd.is_number_integer() && sd.get<std::int64_t>() >= 0))
        throw ConfigError("seed must be a nonnegative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("periodic")) {
      c.d_max = integer(j.at("periodic"), "d_max", c.d_max);
      c.m_check = integer(j.at("periodic"), "m_check", c.m_check);
    }
    c.n_window = integer(j, "n_window", c.n_window);
    if (j.contains("witness")) {
      const json& w = j.at("witness");
      c.mc_samples = integer(w, "mc_samples", c.mc_samples);
      c.epsilon = num(w, "epsilon", c.epsilon);
      c.witness_horizon = integer(w, "horizon", c.witness_horizon);
      if (w.contains("region")) c.witness_region = region_from_json(w.at("region"));
    }
    if (j.contains("profile")) {
      c.profile_json = j.at("profile");
      c.profile = profile_from_json(c.profile_json);
    }
    if (j.contains("alpha")) c.alpha = grid_from_json(j.at("alpha"), "alpha");
    if (j.contains("lambda")) c.lambda = grid_from_json(j.at("lambda"), "lambda");
    c.samples = integer(j, "samples", c.samples);
    c.truncation = integer(j, "truncation", c.truncation);
    c.out_dir = j.value("out", "");
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  if (c.d_max < 1 || c.m_check < 1 || c.mc_samples < 1 || c.witness_horizon < 0 || c.samples < 1 ||
      c.truncation < 0 || c.n_window < 0)
    throw ConfigError("counts in the config must be positive");
  for (double l : c.lambda.points)
    if (!(l > 0.0)) throw ConfigError("lambda grid must be positive");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON in ") + path + ": " + e.what());
  }
  return parse_config(j);
}

const std::vector<BundledExample>& bundled_examples() {
  static const std::vector<BundledExample> table = [] {
    const char* raw = R"([
      {"name": "fixed-prefix",
       "u": {"kind": "constant", "c": 2},
       "v": {"kind": "prefix", "prefix": [3], "tail": 2}},
      {"name": "sparse-periodic",
       "u": {"kind": "sparse", "base": 2, "exceptions": {"positions": "formula",
             "params": {"scale": 5, "ratio": 4, "k0": 1, "offsets": [1, 4], "value": {"law": "reciprocal", "c": 1}}}},
       "v": {"kind": "sparse", "base": 2, "exceptions": {"positions": "formula",
             "params": {"scale": 5, "ratio": 4, "k0": 1, "offsets": [2, 3], "value": {"law": "reciprocal", "c": 1}}}}},
      {"name": "telescoping-eps",
       "u": {"kind": "constant", "c": 2},
       "v": {"kind": "ratio", "base": 2, "epsilon": {"form": "power", "c": 1, "s": 1}}},
      {"name": "prefix-1-4",
       "u": {"kind": "constant", "c": 2},
       "v": {"kind": "prefix", "prefix": [1, 4], "tail": 2}},
      {"name": "scaled-2-3",
       "u": {"kind": "scaled", "a": 2, "base": {"kind": "constant", "c": 1}},
       "v": {"kind": "scaled", "a": 3, "base": {"kind": "constant", "c": 1}}}
    ])";
    std::vector<BundledExample> out;
    for (const auto& e : json::parse(raw))
      out.push_back({e.at("name").get<std::string>(), weight_spec_from_json(e.at("u")),
                     weight_spec_from_json(e.at("v")), 2.0});
    return out;
  }();
  return table;
}

std::optional<std::string> match_bundled(const WeightSpec& u, const WeightSpec& v, double p) {
  for (const auto& e : bundled_examples())
    if (e.p == p && structurally_equal(e.u, u) && structurally_equal(e.v, v)) return e.name;
  return std::nullopt;
}

std::string dump_report(const json& j) { return j.dump(2) + "\n"; }

RunResult run_classify(const ExperimentConfig& cfg) {
  const WeightSpec& spec = need_spec(cfg.u, "spec");
  RunResult res;
  Classification c = classify(spec, cfg.p, cfg.horizon);
  json verdicts = {{"hypercyclic", to_json(c.hypercyclic)},
                   {"mixing", to_json(c.mixing)},
                   {"chaotic_fhc", to_json(c.chaotic_fhc)},
                   {"has_nontrivial_invariant_measure", to_json(c.has_nontrivial_invariant_measure)}};
  res.report = {{"name", cfg.name}, {"spec", to_json(spec)}, {"p", cfg.p}, {"horizon", cfg.horizon},
                {"verdicts", verdicts}};
  bool all_undecided = c.hypercyclic.undecided() && c.mixing.undecided() && c.chaotic_fhc.undecided() &&
                       c.has_nontrivial_invariant_measure.undecided();
  res.exit_code = all_undecided ? 2 : 0;
  write_file(cfg.out_dir, "classify.json", dump_report(res.report), res);
  return res;
}

RunResult run_compare(const ExperimentConfig& cfg) {
  const WeightSpec& u = need_spec(cfg.u, "u");
  const WeightSpec& v = need_spec(cfg.v, "v");
  if (cfg.modules)
    for (const auto& m : *cfg.modules)
      if (!kCompareModules.count(m)) throw ConfigError("unknown compare module \"" + m + "\"");
  RunResult res;
  json& r = res.report;
  r["name"] = cfg.name;
  r["p"] = cfg.p;
  r["horizon"] = cfg.horizon;
  auto bundled = match_bundled(u, v, cfg.p);
  r["bundled_example"] = bundled ? json(*bundled) : json(nullptr);
  if (cfg.modules && cfg.modules->empty()) {
    r["summary"] = to_string(OrthoSummary::Undecided);
    res.exit_code = 2;
    return res;
  }
  bool decided = false;

  OrthoConfig oc;
  oc.horizon = cfg.horizon;
  oc.p = cfg.p;
  oc.d_max = cfg.d_max;
  oc.m_check = cfg.m_check;
  oc.n_window = cfg.n_window;
  std::optional<OrthogonalityReport> orep;
  const bool any_ortho = enabled(cfg, "similarity") || enabled(cfg, "window") || enabled(cfg, "periodic") ||
                         enabled(cfg, "gaussian_equivalence");
  if (any_ortho) {
    orep = orthogonality_report(u, v, cfg.p, oc);
    r["orthogonality"] = to_json(*orep);
    const std::pair<const char*, Rule> sections[] = {{"similarity", Rule::Similarity},
                                                     {"window", Rule::WindowedRatio},
                                                     {"periodic", Rule::SharedPeriodicPoint},
                                                     {"gaussian_equivalence", Rule::GaussianEquivalence}};
    for (const auto& [key, rule] : sections) {
      if (!enabled(cfg, key)) continue;
      for (const Verdict& vd : orep->verdicts)
        if (vd.rule == rule) {
          r[key] = to_json(vd);
          decided = decided || !vd.undecided();
        }
    }
    r["summary"] = to_string(orep->summary);
  }

  // measures for the product-measure sections
  std::optional<std::pair<InvariantProductMeasure, InvariantProductMeasure>> measures;
  std::string measure_source;
  if (cfg.mu0_u || cfg.mu0_v) {
    MarginalMeasure a = cfg.mu0_u ? *cfg.mu0_u : *cfg.mu0_v;
    MarginalMeasure b = cfg.mu0_v ? *cfg.mu0_v : *cfg.mu0_u;
    measures.emplace(InvariantProductMeasure{a, u, cfg.p}, InvariantProductMeasure{b, v, cfg.p});
    measure_source = "config";
  } else if (orep && orep->kappa_hat) {
    int d = field_dim(u.field());
    measures.emplace(InvariantProductMeasure{MarginalMeasure::gaussian(1.0, d), u, cfg.p},
                     InvariantProductMeasure{MarginalMeasure::gaussian(*orep->kappa_hat, d), v, cfg.p});
    measure_source = "gaussian, sigma' = kappa_hat";
  } else {
    int d = field_dim(u.field());
    measures.emplace(InvariantProductMeasure{MarginalMeasure::gaussian(1.0, d), u, cfg.p},
                     InvariantProductMeasure{MarginalMeasure::gaussian(1.0, d), v, cfg.p});
    measure_source = "gaussian, sigma = sigma' = 1";
  }

  if (enabled(cfg, "kakutani")) {
    try {
      HellingerReport hr = kakutani_decide(measures->first, measures->second, cfg.horizon);
      json k = to_json(hr);
      k["marginals"] = {{"u", to_json(measures->first.mu0)}, {"v", to_json(measures->second.mu0)},
                        {"source", measure_source}};
      r["kakutani"] = k;
      decided = decided || hr.verdict != KakutaniVerdict::Undecided;
      if (!r.contains("summary") || r["summary"] == to_string(OrthoSummary::Undecided)) {
        if (hr.verdict == KakutaniVerdict::Equivalent || hr.verdict == KakutaniVerdict::NonOrthogonal)
          r["summary"] = to_string(OrthoSummary::NotOrthogonal);
      }
    } catch (const Error& e) {
      r["kakutani"] = {{"skipped", e.what()}};
    }
  }

  if (enabled(cfg, "empirical_witness")) {
    WitnessConfig wc;
    wc.mc_samples = cfg.mc_samples;
    wc.epsilon = cfg.epsilon;
    wc.horizon = cfg.witness_horizon;
    wc.seed = cfg.seed;
    Region K = cfg.witness_region ? *cfg.witness_region : Region::ball({3.0}, 2.9, "K");
    json w = {{"mc_samples", wc.mc_samples}, {"epsilon", wc.epsilon}, {"seed", wc.seed}};
    try {
      EmpiricalWitness ew = empirical_orthogonality_witness(u, v, measures->first, measures->second, K, wc);
      w["found"] = true;
      w["witness"] = to_json(ew);
      decided = true;
    } catch (const NoWitnessFound& e) {
      w["found"] = false;
      w["reason"] = e.what();
    } catch (const Error& e) {
      w["skipped"] = e.what();
    }
    r["empirical_witness"] = w;
  }

  if (enabled(cfg, "fhc_transfer")) {
    FhcTransfer f = fhc_transfer_constant(u, v, cfg.horizon);
    r["fhc_transfer"] = to_json(f);
    decided = decided || !f.converged.undecided();
  }
  if (!r.contains("summary")) r["summary"] = to_string(OrthoSummary::Undecided);
  res.exit_code = decided ? 0 : 2;
  write_file(cfg.out_dir, "compare.json", dump_report(r), res);
  return res;
}

RunResult run_curves(const ExperimentConfig& cfg) {
  RunResult res;
  std::set<std::string> modules;
  if (cfg.modules) {
    for (const auto& m : *cfg.modules)
      if (!kCurveModules.count(m)) throw ConfigError("unknown curves module \"" + m + "\"");
    modules = *cfg.modules;
    if ((modules.count("acf") || modules.count("theta")) && !cfg.profile)
      throw ConfigError("acf and theta curves need a profile");
    if (modules.count("hellinger") && (!cfg.u || !cfg.v)) throw ConfigError("hellinger stream needs u and v");
  } else {
    if (cfg.profile) modules.insert({"acf", "theta"});
    if (cfg.u && cfg.v) modules.insert("hellinger");
  }
  json& r = res.report;
  r["name"] = cfg.name;
  r["modules"] = modules;
  if (modules.empty()) {
    res.exit_code = 2;
    return res;
  }
  if (modules.count("acf")) {
    auto [hp, hm] = log_substitution(*cfg.profile);
    std::ostringstream os;
    os << "alpha,acf_h_plus,acf_h_minus\n";
    for (double a : cfg.alpha.points) os << fmt(a) << "," << fmt(acf(hp, a)) << "," << fmt(acf(hm, a)) << "\n";
    write_file(cfg.out_dir, "acf.csv", os.str(), res);
  }
  if (modules.count("theta")) {
    std::ostringstream os;
    os << "lambda,theta\n";
    for (double l : cfg.lambda.points) os << fmt(l) << "," << fmt(theta(*cfg.profile, l)) << "\n";
    write_file(cfg.out_dir, "theta.csv", os.str(), res);
  }
  if (modules.count("hellinger")) {
    int d = field_dim(cfg.u->field());
    MarginalMeasure a = cfg.mu0_u ? *cfg.mu0_u : MarginalMeasure::gaussian(1.0, d);
    MarginalMeasure b = cfg.mu0_v ? *cfg.mu0_v : a;
    HellingerReport hr = kakutani_decide({a, *cfg.u, cfg.p}, {b, *cfg.v, cfg.p}, cfg.horizon);
    std::ostringstream os;
    os << "n,H_n,deficit_partial_sum\n";
    double acc = 0.0;
    for (std::size_t n = 0; n < hr.per_n.size(); ++n) {
      acc += 1.0 - hr.per_n[n];
      os << n << "," << fmt(hr.per_n[n]) << "," << fmt(acc) << "\n";
    }
    write_file(cfg.out_dir, "hellinger.csv", os.str(), res);
    r["kakutani"] = to_json(hr);
  }
  r["files"] = res.files;
  return res;
}

RunResult run_sample(const ExperimentConfig& cfg) {
  const WeightSpec& spec = need_spec(cfg.u, "spec");
  int d = field_dim(spec.field());
  InvariantProductMeasure m{cfg.mu0_u ? *cfg.mu0_u : MarginalMeasure::gaussian(1.0, d), spec, cfg.p};
  long N = cfg.truncation > 0 ? cfg.truncation : default_truncation(spec, cfg.p);
  ProductSampler sampler(m, N);
  RunResult res;
  std::ostringstream os;
  const bool complex = spec.field() == Field::Complex || m.mu0.field_dim() == 2;
  for (long n = 0; n <= N; ++n) {
    if (n) os << ",";
    if (complex)
      os << "re_n" << n << ",im_n" << n;
    else
      os << "n" << n;
  }
  os << "\n";
  for (long i = 0; i < cfg.samples; ++i) {
    auto x = sampler.draw(cfg.seed, static_cast<std::uint64_t>(i));
    for (long n = 0; n <= N; ++n) {
      if (n) os << ",";
      os << fmt(x[n].real());
      if (complex) os << "," << fmt(x[n].imag());
    }
    os << "\n";
  }
  write_file(cfg.out_dir, "samples.csv", os.str(), res);
  res.report = {{"name", cfg.name}, {"truncation", N}, {"samples", cfg.samples}, {"seed", cfg.seed},
                {"measure", {{"mu0", to_json(m.mu0)}, {"spec", to_json(spec)}, {"p", cfg.p}}}};
  return res;
}

}  // namespace shiftlab
