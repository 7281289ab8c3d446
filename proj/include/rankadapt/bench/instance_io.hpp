#pragma once

// On-disk problem instances (matrix CSVs plus a JSON descriptor) and the JSON
// views used by the `gen`, `estimate` and `bounds` commands.

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "rankadapt/bounds.hpp"
#include "rankadapt/estimators.hpp"
#include "rankadapt/problem_gen.hpp"

namespace rankadapt::bench {

/// Headerless numeric CSV, one matrix row per line, shortest round-trip floats.
void write_matrix_csv(const Matrix& M, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// Writes A.csv, X.csv, Y.csv (and covariance.csv when known) next to
/// instance.json in `dir`. Returns the descriptor path.
std::filesystem::path save_instance(const ProblemInstance& inst, const std::filesystem::path& dir);

/// Accepts the descriptor path or its directory. Shape mismatches raise
/// DomainError, unreadable files IoError.
ProblemInstance load_instance(const std::filesystem::path& path);

struct GenOptions {
  Setting setting = Setting::regression;
  Index d = 20;
  Index r = 5;
  Index n = 500;
  double b = 1.0;
  double sigma = 0.1;
  std::uint64_t seed = 1;
  bool j_squared_covariance = false;
};

/// Regression: target from the 1/j^b profile and a fresh N(0, Sigma) design.
/// Sysid: stable symmetric target (1/(j+1)^b) and a simulated trajectory.
ProblemInstance generate_instance(const GenOptions& opt);

nlohmann::json report_to_json(const EstimateReport& rep, const std::string& method);

/// Reads BoundInputs from JSON keys n, delta, sigma, d_x, d_y, r,
/// target_spectrum, cov_spectrum (spectra are sorted nonincreasing on read).
BoundInputs bound_inputs_from_json(const nlohmann::json& j);

/// Every bound evaluator applicable to the inputs. Optional keys: epsilon
/// (sample-complexity entries), tau and z_op_norm (denoising entries), k
/// (per-rank error terms). Evaluators that throw report {"error": message}.
nlohmann::json evaluate_bounds(const nlohmann::json& j);

}  // namespace rankadapt::bench
