#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "spikan/commands.hpp"
#include "spikan/errors.hpp"
#include "spikan/io.hpp"

namespace {

std::vector<std::size_t> parse_counts(const std::string& s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  for (const auto& tok : spikan::io::split(s, ',')) {
    const long long v = spikan::io::parse_int(tok);
    if (v < 1) throw spikan::InvalidArgument("counts must be positive, got '" + tok + "'");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separable and dense physics-informed Kolmogorov-Arnold networks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* train = app.add_subcommand("train", "Train a model from a configuration file");
  train->add_option("config", config_path, "Configuration file (key = value)")->required();

  std::string run_dir, eval_points;
  auto* eval = app.add_subcommand("eval", "Re-evaluate a finished run directory");
  eval->add_option("run_dir", run_dir, "Run directory written by train")->required();
  eval->add_option("--points", eval_points, "Evaluation points per axis, comma-separated");

  std::string bench_a, bench_b, bench_out;
  int iterations = 100, warmup = 10;
  auto* bench = app.add_subcommand("bench", "Time two configurations against each other");
  bench->add_option("baseline", bench_a, "Baseline configuration")->required();
  bench->add_option("candidate", bench_b, "Candidate configuration")->required();
  bench->add_option("--iterations", iterations, "Timed iterations")->capture_default_str();
  bench->add_option("--warmup", warmup, "Untimed warmup iterations")->capture_default_str();
  bench->add_option("--output", bench_out, "Write the report to this file");

  std::string ref_problem, ref_resolution, ref_cache = "references";
  auto* reference = app.add_subcommand("reference", "Compute or reuse a cached reference solution");
  reference->add_option("problem", ref_problem, "Problem name")->required();
  reference->add_option("resolution", ref_resolution, "nx,nt for allencahn1d1t; points per axis otherwise")->required();
  reference->add_option("--cache", ref_cache, "Cache directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      spikan::cmd_train(config_path, &std::cout).write(std::cout);
    } else if (*eval) {
      const auto pts = parse_counts(eval_points);
      spikan::cmd_eval(run_dir, pts, &std::cout).write(std::cout);
    } else if (*bench) {
      const auto r = spikan::cmd_bench(spikan::load_config(bench_a), spikan::load_config(bench_b), iterations, warmup,
                                       &std::cout);
      r.write(std::cout);
      if (!bench_out.empty()) r.write(bench_out);
    } else if (*reference) {
      const auto res = parse_counts(ref_resolution);
      const auto r = spikan::cmd_reference(ref_problem, res, ref_cache);
      std::cout << (r.reused ? "reused " : "created ") << r.path << " (checksum " << r.checksum << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return spikan::exit_code_for(e);
  }
  return 0;
}
