#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "shiftlab/errors.hpp"
#include "shiftlab/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"shiftlab: orthogonality experiments for weighted backward shifts"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  long horizon = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--horizon", horizon, "override the config horizon")->check(CLI::PositiveNumber);
  };
  CLI::App* classify = app.add_subcommand("classify", "hypercyclicity, mixing, chaos and invariant measures");
  CLI::App* compare = app.add_subcommand("compare", "orthogonality report for a pair of weights");
  CLI::App* curves = app.add_subcommand("curves", "CSV tables of autocorrelations, Theta and H_n");
  CLI::App* sample = app.add_subcommand("sample", "draw truncated vectors from an invariant product measure");
  for (CLI::App* sub : {classify, compare, curves, sample}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    shiftlab::ExperimentConfig cfg = shiftlab::load_config(config_path);
    for (CLI::App* sub : {classify, compare, curves, sample})
      if (sub->parsed()) {
        if (sub->count("--out")) cfg.out_dir = out_dir;
        if (sub->count("--seed")) cfg.seed = seed;
        if (sub->count("--horizon")) cfg.horizon = horizon;
      }
    shiftlab::RunResult res;
    if (classify->parsed())
      res = shiftlab::run_classify(cfg);
    else if (compare->parsed())
      res = shiftlab::run_compare(cfg);
    else if (curves->parsed())
      res = shiftlab::run_curves(cfg);
    else
      res = shiftlab::run_sample(cfg);
    std::cout << shiftlab::dump_report(res.report);
    return res.exit_code;
  } catch (const shiftlab::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
