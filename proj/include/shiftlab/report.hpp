#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "shiftlab/autocorr.hpp"
#include "shiftlab/measures.hpp"
#include "shiftlab/orbits.hpp"
#include "shiftlab/weights.hpp"

namespace shiftlab {

struct Grid1D {
  std::vector<double> points;
  static Grid1D linspace(double from, double to, long count);
};

struct ExperimentConfig {
  std::string name;
  std::optional<WeightSpec> u, v;
  double p = 2.0;
  long horizon = 100000;
  std::optional<std::set<std::string>> modules;  // nullopt: everything the inputs allow
  std::optional<MarginalMeasure> mu0_u, mu0_v;
  std::uint64_t seed = 1;
  // orthogonality
  long d_max = 64;
  long m_check = 1000;
  long n_window = 4;
  // empirical witness
  long mc_samples = 10000;
  double epsilon = 0.1;
  long witness_horizon = 64;
  std::optional<Region> witness_region;
  // curves
  std::optional<DensityProfile> profile;
  nlohmann::json profile_json;
  Grid1D alpha = Grid1D::linspace(-4.0, 4.0, 161);
  Grid1D lambda = Grid1D::linspace(0.25, 4.0, 151);
  // sampling
  long samples = 10;
  long truncation = 0;  // 0 picks the default truncation
  std::string out_dir;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

struct BundledExample {
  std::string name;
  WeightSpec u;
  WeightSpec v;
  double p = 2.0;
};

const std::vector<BundledExample>& bundled_examples();
std::optional<std::string> match_bundled(const WeightSpec& u, const WeightSpec& v, double p);

struct RunResult {
  nlohmann::json report = nlohmann::json::object();
  int exit_code = 0;
  std::vector<std::string> files;
};

RunResult run_classify(const ExperimentConfig& cfg);
RunResult run_compare(const ExperimentConfig& cfg);
RunResult run_curves(const ExperimentConfig& cfg);
RunResult run_sample(const ExperimentConfig& cfg);

// Sorted keys, two-space indent, trailing newline.
std::string dump_report(const nlohmann::json& j);

}  // namespace shiftlab
