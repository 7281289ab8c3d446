// rankadapt: benchmark harness and instance tools.
//
//   rankadapt bench <experiment> [--config PATH] [--seed U64] [--trials N] [--out DIR] [--set k=v ...]
//   rankadapt gen --out DIR [--setting regression|sysid] [--d D] [--r R] [--n N] [--b B] ...
//   rankadapt estimate --instance PATH --method NAME [--rank R] [--delta D]
//   rankadapt bounds --inputs PATH
//
// Exit codes: 0 success, 1 config error, 2 numerical failure, 3 I/O error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankadapt/bench/config.hpp"
#include "rankadapt/bench/experiment.hpp"
#include "rankadapt/bench/instance_io.hpp"
#include "rankadapt/errors.hpp"

namespace {

using namespace rankadapt;
using namespace rankadapt::bench;
using nlohmann::json;

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

struct BenchArgs {
  std::string experiment;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> workers;
  std::string out;
  std::vector<std::string> sets;
};

int run_bench(const BenchArgs& a) {
  const auto id = parse_experiment_id(a.experiment);
  if (!id) throw ConfigError("experiment_id", "unknown experiment '" + a.experiment + "'");
  const json file = a.config.empty() ? json::object() : load_config_file(a.config);
  json overrides = json::object();
  for (const auto& s : a.sets) apply_set_flag(overrides, s);
  if (a.seed) overrides["master_seed"] = *a.seed;
  if (a.trials) overrides["trials"] = *a.trials;
  if (a.workers) overrides["workers"] = *a.workers;
  if (!a.out.empty()) overrides["output_dir"] = a.out;
  const ExperimentConfig cfg = parse_config(*id, file, overrides);

  const ExperimentResult res = run_experiment(cfg);
  const auto files = write_artifacts(cfg, res);
  for (const auto& f : files) std::cout << f.string() << '\n';
  if (!res.failures.empty())
    std::cerr << res.failures.size() << " trial failure(s); see " << kManifestFile << '\n';
  return kOk;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path + ": invalid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-adaptive matrix estimation: benchmarks, instances, estimators and bounds"};
  app.require_subcommand(1);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment and write CSV/JSON artifacts");
  bench_cmd->add_option("experiment", bench.experiment, "E1..E5 or the full experiment id")->required();
  bench_cmd->add_option("--config", bench.config, "JSON config file");
  bench_cmd->add_option("--seed", bench.seed, "Master seed");
  bench_cmd->add_option("--trials", bench.trials, "Trials per scenario");
  bench_cmd->add_option("--workers", bench.workers, "Worker threads (0 = all cores)");
  bench_cmd->add_option("--out", bench.out, "Output directory");
  bench_cmd->add_option("--set", bench.sets, "Override a config key: key=value")->take_all();

  GenOptions gen;
  std::string gen_setting = "regression";
  std::string gen_out;
  std::string gen_cov = "identity";
  auto* gen_cmd = app.add_subcommand("gen", "Generate a problem instance on disk");
  gen_cmd->add_option("--setting", gen_setting)->check(CLI::IsMember({"regression", "sysid"}));
  gen_cmd->add_option("--d", gen.d)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--r", gen.r)->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--n", gen.n)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--b", gen.b);
  gen_cmd->add_option("--sigma", gen.sigma);
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_option("--covariance", gen_cov)->check(CLI::IsMember({"identity", "j_squared"}));
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();

  std::string est_instance;
  std::string est_method;
  MethodParams est_params;
  auto* est_cmd = app.add_subcommand("estimate", "Run one estimator and print its report as JSON");
  est_cmd->add_option("--instance", est_instance, "instance.json or its directory")->required();
  est_cmd->add_option("--method", est_method)
      ->required()
      ->check(CLI::IsMember({"lse", "rlse", "tlse", "nuclear", "tnuclear", "rsc"}));
  est_cmd->add_option("--rank", est_params.rank);
  est_cmd->add_option("--delta", est_params.delta);

  std::string bounds_inputs;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate every bound for JSON inputs");
  bounds_cmd->add_option("--inputs", bounds_inputs)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*bench_cmd) return run_bench(bench);
    if (*gen_cmd) {
      gen.setting = gen_setting == "sysid" ? Setting::sysid : Setting::regression;
      gen.j_squared_covariance = gen_cov == "j_squared";
      std::cout << save_instance(generate_instance(gen), gen_out).string() << '\n';
      return kOk;
    }
    if (*est_cmd) {
      const ProblemInstance inst = load_instance(est_instance);
      const auto method = parse_method(est_method);
      if (method == Method::rlse && est_params.rank <= 0)
        throw ConfigError("rank", "rlse needs --rank >= 1");
      const EstimateReport rep = run_estimator(*method, inst, est_params);
      std::cout << report_to_json(rep, est_method).dump(2) << '\n';
      return kOk;
    }
    if (*bounds_cmd) {
      std::cout << evaluate_bounds(read_json(bounds_inputs)).dump(2) << '\n';
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const SchemaError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
