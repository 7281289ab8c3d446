#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace rankadapt::bench {

/// Malformed or inconsistent configuration. Carries the offending key when
/// there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& msg)
      : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ExperimentId { E1_denoise_bounds, E2_alignment, E3_adaptivity, E4_sysid, E5_tightness };

std::string to_string(ExperimentId id);
std::optional<ExperimentId> parse_experiment_id(const std::string& s);

enum class Regime { low_rank, high_rank };
enum class CovarianceKind { identity, j_squared };

struct ExperimentConfig {
  ExperimentId experiment_id = ExperimentId::E3_adaptivity;
  Regime regime = Regime::low_rank;
  int d = 50;
  int r = 10;
  int n = 1000;
  double sigma = 0.1;
  std::vector<double> b_grid;
  int trials = 30;
  double delta = 0.05;
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> include_estimators;
  /// 0 selects std::thread::hardware_concurrency().
  int workers = 0;
  /// E1 threshold multipliers tau.
  std::vector<double> tau_grid;
  /// E5 sample sizes (at dimension d) and dimensions (at sample size n).
  std::vector<int> n_grid;
  std::vector<int> d_grid;
  /// E2 circular shifts; empty means all of 0..d.
  std::vector<int> shifts;
  CovarianceKind covariance = CovarianceKind::identity;
  /// Draw a new design per trial (true) or one per scenario (false).
  bool resample_design = true;

  /// Throws ConfigError naming the first invalid key.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Defaults for an experiment and regime.
ExperimentConfig default_config(ExperimentId id, Regime regime = Regime::low_rank);

/// Resolves a config: experiment defaults, then `file` keys, then `overrides`
/// (later wins). Unknown keys, wrong types and invalid values raise
/// ConfigError.
ExperimentConfig parse_config(ExperimentId id, const nlohmann::json& file,
                              const nlohmann::json& overrides = nlohmann::json::object());

/// Reads a JSON config file (ConfigError on I/O or parse failure).
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Turns `key=value` into {key: value}; value is parsed as JSON when it can
/// be, and kept as a string otherwise.
void apply_set_flag(nlohmann::json& overrides, const std::string& assignment);

}  // namespace rankadapt::bench
