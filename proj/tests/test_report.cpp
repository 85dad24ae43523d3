#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "shiftlab/errors.hpp"
#include "shiftlab/json_io.hpp"
#include "shiftlab/report.hpp"

using namespace shiftlab;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("shiftlab-report-test-" + name);
  fs::remove_all(dir);
  return dir;
}

json constant_spec(double c) { return {{"kind", "constant"}, {"c", c}}; }

}  // namespace

TEST_CASE("config parsing") {
  ExperimentConfig c = parse_config({{"name", "x"}, {"spec", constant_spec(2)}, {"p", 3}, {"horizon", 500}});
  CHECK(c.name == "x");
  REQUIRE(c.u);
  CHECK(structurally_equal(*c.u, WeightSpec::constant(Scalar::real(2))));
  CHECK(c.p == 3.0);
  CHECK(c.horizon == 500);
  CHECK_FALSE(c.modules.has_value());

  ExperimentConfig g = parse_config({{"profile", {{"kind", "uniform"}, {"a", 0}, {"b", 1}}},
                                     {"lambda", {1, 2, 4}},
                                     {"alpha", {{"from", -1}, {"to", 1}, {"count", 5}}},
                                     {"modules", {"theta"}}});
  REQUIRE(g.profile);
  CHECK(g.lambda.points == std::vector<double>{1, 2, 4});
  CHECK(g.alpha.points.size() == 5);
  CHECK(g.alpha.points.front() == -1.0);
  CHECK(g.modules->count("theta") == 1);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
  CHECK_THROWS_AS(parse_config({{"spec", constant_spec(2)}, {"p", 0.5}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"spec", constant_spec(2)}, {"horizon", "big"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"spec", {{"kind", "mystery"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"seed", -3}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"lambda", {1, -2}}}), ConfigError);

  fs::path dir = scratch("broken");
  fs::create_directories(dir);
  std::ofstream(dir / "broken.json") << "{ \"spec\": ";
  CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
  CHECK_THROWS_AS(run_classify(parse_config({{"p", 2}})), ConfigError);
}

TEST_CASE("bundled examples match their configs") {
  CHECK(bundled_examples().size() == 5);
  for (const BundledExample& b : bundled_examples()) {
    fs::path p = fs::path(SHIFTLAB_CONFIG_DIR) / (b.name + ".json");
    REQUIRE(fs::exists(p));
    ExperimentConfig c = load_config(p.string());
    REQUIRE(c.u);
    REQUIRE(c.v);
    CHECK(match_bundled(*c.u, *c.v, c.p) == b.name);
    CHECK(match_bundled(*c.v, *c.u, c.p) != b.name);
  }
  CHECK_FALSE(match_bundled(WeightSpec::constant(Scalar::real(5)), WeightSpec::constant(Scalar::real(7)), 2).has_value());
}

TEST_CASE("every shipped config parses") {
  for (const auto& entry : fs::directory_iterator(SHIFTLAB_CONFIG_DIR)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_config(entry.path().string()));
  }
}

TEST_CASE("run_classify examples and exit codes") {
  RunResult two = run_classify(parse_config({{"spec", constant_spec(2)}, {"horizon", 2000}}));
  CHECK(two.exit_code == 0);
  for (const char* k : {"hypercyclic", "mixing", "chaotic_fhc", "has_nontrivial_invariant_measure"})
    CHECK(two.report["verdicts"][k]["status"] == "Established");
  CHECK(two.files.empty());

  RunResult one = run_classify(parse_config({{"spec", constant_spec(1)}, {"horizon", 2000}}));
  CHECK(one.exit_code == 0);
  CHECK(one.report["verdicts"]["hypercyclic"]["status"] == "Refuted");
}

TEST_CASE("run_compare with a module subset is deterministic") {
  json cfg = {{"name", "pair"},
              {"u", {{"kind", "scaled"}, {"a", 2}, {"base", constant_spec(1)}}},
              {"v", {{"kind", "scaled"}, {"a", 3}, {"base", constant_spec(1)}}},
              {"horizon", 5000},
              {"modules", {"similarity", "window", "fhc_transfer"}}};
  RunResult a = run_compare(parse_config(cfg));
  RunResult b = run_compare(parse_config(cfg));
  CHECK(dump_report(a.report) == dump_report(b.report));
  CHECK(a.exit_code == 0);
  CHECK(a.report["summary"] == "Orthogonal");
  CHECK(a.report["bundled_example"] == "scaled-2-3");
  CHECK_FALSE(a.report.contains("kakutani"));

  cfg["modules"] = {"nonsense"};
  CHECK_THROWS_AS(run_compare(parse_config(cfg)), ConfigError);
}

TEST_CASE("run_curves writes the requested tables") {
  fs::path dir = scratch("curves");
  json cfg = {{"profile", {{"kind", "uniform"}, {"a", 0}, {"b", 1}}},
              {"lambda", {1, 4}},
              {"alpha", {0, 0.5}},
              {"modules", {"theta", "acf"}},
              {"out", dir.string()}};
  RunResult r = run_curves(parse_config(cfg));
  CHECK(r.exit_code == 0);
  CHECK(read_file(dir / "theta.csv") == "lambda,theta\n1,1\n4,0.5\n");
  std::string acf_csv = read_file(dir / "acf.csv");
  CHECK(acf_csv.rfind("alpha,acf_h_plus,acf_h_minus\n", 0) == 0);
  CHECK_FALSE(fs::exists(dir / "hellinger.csv"));

  fs::path empty = scratch("curves-empty");
  cfg["modules"] = json::array();
  cfg["out"] = empty.string();
  RunResult e = run_curves(parse_config(cfg));
  CHECK(e.exit_code == 2);
  CHECK(e.files.empty());
}

TEST_CASE("run_sample is reproducible per seed") {
  fs::path dir = scratch("sample");
  json cfg = {{"spec", constant_spec(2)}, {"samples", 3}, {"seed", 5}, {"out", dir.string()}};
  run_sample(parse_config(cfg));
  std::string first = read_file(dir / "samples.csv");
  run_sample(parse_config(cfg));
  CHECK(read_file(dir / "samples.csv") == first);
  CHECK(first.rfind("n0,n1,", 0) == 0);

  cfg["seed"] = 6;
  run_sample(parse_config(cfg));
  CHECK(read_file(dir / "samples.csv") != first);

  cfg["marginal"] = {{"kind", "discrete"}, {"support", {1}}, {"weights", {1}}};
  cfg["truncation"] = 3;
  run_sample(parse_config(cfg));
  CHECK(read_file(dir / "samples.csv") == "n0,n1,n2,n3\n1,0.5,0.25,0.125\n1,0.5,0.25,0.125\n1,0.5,0.25,0.125\n");
}
