#pragma once

// Monte-Carlo harness for the five experiment families.
//
// Work is split into (scenario, trial) items evaluated on a worker pool.
// Every item seeds its own streams from (master_seed, scenario, trial), and
// results land in preallocated slots, so the output does not depend on the
// worker count or on scheduling.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankadapt/bench/config.hpp"
#include "rankadapt/bench/csv.hpp"

namespace rankadapt::bench {

/// One E1 evaluation: both denoising bounds for one (tau, trial), plus the
/// quantities that bracket the adaptive bound.
struct E1Sample {
  double tau = 0;
  int trial = 0;
  double new_bound = 0;
  double chatterjee_bound = 0;
  double z_op_norm_sq = 0;
  double a_frob_sq = 0;
  long k_tau = 0;
};

struct TrialFailure {
  std::string scenario;
  int trial = 0;
  std::string estimator;  // empty when instance generation failed
  std::string message;
};

struct ExperimentResult {
  std::vector<TrialRow> trials;      // sorted by scenario, trial, estimator
  std::vector<SummaryRow> summary;   // one per (scenario, estimator)
  std::vector<E1Row> e1;
  std::vector<E1Sample> e1_samples;
  std::vector<E2TableRow> e2_table;
  std::vector<E5BoundRow> e5_bounds;
  std::vector<TrialFailure> failures;
  double seconds = 0;
};

/// Validates cfg (ConfigError before any work) and runs every trial.
/// Per-trial failures become NaN rows and entries in `failures`.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Sample mean, sample standard deviation (0 for fewer than two values) and
/// max over the non-NaN entries; all NaN when there are none.
struct Stats {
  double mean = 0;
  double std = 0;
  double max = 0;
  std::size_t count = 0;
};
Stats describe(const std::vector<double>& values);

/// Version string in git-describe form, fixed at configure time.
std::string version_string();

/// Manifest document: config, version, duration, file list and failures.
nlohmann::json make_manifest(const ExperimentConfig& cfg, const ExperimentResult& res);

/// Writes trials.csv, summary.csv, the experiment's extra CSV and
/// manifest.json into cfg.output_dir (created if needed). Returns the paths
/// written. IoError on failure.
std::vector<std::filesystem::path> write_artifacts(const ExperimentConfig& cfg,
                                                   const ExperimentResult& res);

/// File names used by write_artifacts.
inline constexpr const char* kTrialsFile = "trials.csv";
inline constexpr const char* kSummaryFile = "summary.csv";
inline constexpr const char* kE1File = "e1_bounds.csv";
inline constexpr const char* kE2File = "e2_table.csv";
inline constexpr const char* kE5File = "e5_bounds.csv";
inline constexpr const char* kManifestFile = "manifest.json";

}  // namespace rankadapt::bench
