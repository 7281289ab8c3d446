#include "rankadapt/bench/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rankadapt/estimators.hpp"

namespace rankadapt::bench {

using nlohmann::json;

namespace {

constexpr const char* kKeys[] = {
    "experiment_id", "regime",  "d",         "r",          "n",          "sigma",
    "b_grid",        "trials",  "delta",     "master_seed", "output_dir", "include_estimators",
    "workers",       "tau_grid", "n_grid",   "d_grid",     "shifts",     "covariance",
    "resample_design",
};

const std::vector<double> kAdaptivityGrid{0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};

std::string regime_name(Regime r) { return r == Regime::low_rank ? "low_rank" : "high_rank"; }
std::string covariance_name(CovarianceKind c) {
  return c == CovarianceKind::identity ? "identity" : "j_squared";
}

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key, "wrong type (got " + std::string(j.type_name()) + ")");
  }
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) throw ConfigError(key, "expected an integer");
  return get_as<int>(j, key);
}

double get_real(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key, "expected a number");
  return j.get<double>();
}

template <class T>
std::vector<T> get_vector(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError(key, "expected an array");
  std::vector<T> out;
  for (const auto& v : j) {
    if constexpr (std::is_same_v<T, int>) {
      out.push_back(get_int(v, key));
    } else if constexpr (std::is_same_v<T, double>) {
      out.push_back(get_real(v, key));
    } else {
      out.push_back(get_as<T>(v, key));
    }
  }
  return out;
}

void apply_keys(ExperimentConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("", "config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment_id" || key == "regime") continue;  // resolved earlier
    if (key == "d") cfg.d = get_int(v, key);
    else if (key == "r") cfg.r = get_int(v, key);
    else if (key == "n") cfg.n = get_int(v, key);
    else if (key == "sigma") cfg.sigma = get_real(v, key);
    else if (key == "b_grid") cfg.b_grid = get_vector<double>(v, key);
    else if (key == "trials") cfg.trials = get_int(v, key);
    else if (key == "delta") cfg.delta = get_real(v, key);
    else if (key == "master_seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw ConfigError(key, "expected a nonnegative integer");
      cfg.master_seed = v.get<std::uint64_t>();
    } else if (key == "output_dir") cfg.output_dir = get_as<std::string>(v, key);
    else if (key == "include_estimators") cfg.include_estimators = get_vector<std::string>(v, key);
    else if (key == "workers") cfg.workers = get_int(v, key);
    else if (key == "tau_grid") cfg.tau_grid = get_vector<double>(v, key);
    else if (key == "n_grid") cfg.n_grid = get_vector<int>(v, key);
    else if (key == "d_grid") cfg.d_grid = get_vector<int>(v, key);
    else if (key == "shifts") cfg.shifts = get_vector<int>(v, key);
    else if (key == "covariance") {
      const auto s = get_as<std::string>(v, key);
      if (s == "identity") cfg.covariance = CovarianceKind::identity;
      else if (s == "j_squared") cfg.covariance = CovarianceKind::j_squared;
      else throw ConfigError(key, "expected \"identity\" or \"j_squared\"");
    } else if (key == "resample_design") {
      if (!v.is_boolean()) throw ConfigError(key, "expected a boolean");
      cfg.resample_design = v.get<bool>();
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
}

std::optional<Regime> find_regime(const json& j) {
  if (!j.is_object() || !j.contains("regime")) return std::nullopt;
  const auto s = get_as<std::string>(j["regime"], "regime");
  if (s == "low_rank") return Regime::low_rank;
  if (s == "high_rank") return Regime::high_rank;
  throw ConfigError("regime", "expected \"low_rank\" or \"high_rank\"");
}

void check_experiment_key(ExperimentId id, const json& j) {
  if (!j.is_object() || !j.contains("experiment_id")) return;
  const auto s = get_as<std::string>(j["experiment_id"], "experiment_id");
  const auto parsed = parse_experiment_id(s);
  if (!parsed) throw ConfigError("experiment_id", "unknown experiment '" + s + "'");
  if (*parsed != id) throw ConfigError("experiment_id", "config is for " + s + ", not " + to_string(id));
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::E1_denoise_bounds: return "E1_denoise_bounds";
    case ExperimentId::E2_alignment: return "E2_alignment";
    case ExperimentId::E3_adaptivity: return "E3_adaptivity";
    case ExperimentId::E4_sysid: return "E4_sysid";
    case ExperimentId::E5_tightness: return "E5_tightness";
  }
  return "unknown";
}

std::optional<ExperimentId> parse_experiment_id(const std::string& s) {
  for (auto id : {ExperimentId::E1_denoise_bounds, ExperimentId::E2_alignment,
                  ExperimentId::E3_adaptivity, ExperimentId::E4_sysid, ExperimentId::E5_tightness}) {
    const std::string name = to_string(id);
    if (s == name || s == name.substr(0, 2)) return id;
  }
  return std::nullopt;
}

ExperimentConfig default_config(ExperimentId id, Regime regime) {
  ExperimentConfig c;
  c.experiment_id = id;
  c.regime = regime;
  const bool high = regime == Regime::high_rank;
  switch (id) {
    case ExperimentId::E1_denoise_bounds:
      c.d = 50;
      c.r = 10;
      c.n = 0;
      c.sigma = 1.0;
      c.trials = 100;
      c.tau_grid = {0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0};
      c.include_estimators = {"svt"};
      break;
    case ExperimentId::E2_alignment:
      c.d = 50;
      c.n = 1000;
      c.r = high ? 45 : 10;
      c.sigma = high ? 0.4 : 0.1;
      c.b_grid = {high ? 0.5 : 1.5};
      c.trials = 30;
      c.include_estimators = {"tlse", "rsc"};
      c.covariance = CovarianceKind::j_squared;
      c.resample_design = false;
      break;
    case ExperimentId::E3_adaptivity:
      c.d = 50;
      c.n = 1000;
      c.r = high ? 45 : 10;
      c.sigma = high ? 0.4 : 0.1;
      c.b_grid = kAdaptivityGrid;
      c.trials = 30;
      c.include_estimators = {"rlse", "tlse", "rsc"};
      break;
    case ExperimentId::E4_sysid:
      c.d = 50;
      c.n = 1000;
      c.r = 10;
      c.sigma = 0.1;
      c.b_grid = kAdaptivityGrid;
      c.trials = 30;
      c.include_estimators = {"rlse", "tlse"};
      break;
    case ExperimentId::E5_tightness:
      c.d = 50;
      c.n = 5000;
      c.r = 10;
      c.sigma = 1.0;
      c.trials = 30;
      c.n_grid = {500, 1000, 2000, 4000, 8000};
      c.d_grid = {20, 30, 40, 50, 60};
      c.include_estimators = {"tlse"};
      c.resample_design = false;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  if (d < 1) throw ConfigError("d", "must be >= 1");
  if (r < 1 || r > d) throw ConfigError("r", "must satisfy 1 <= r <= d");
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  if (!(sigma >= 0)) throw ConfigError("sigma", "must be >= 0");
  if (!(delta > 0 && delta < 0.5)) throw ConfigError("delta", "must lie in (0, 0.5)");
  if (workers < 0) throw ConfigError("workers", "must be >= 0");
  for (double b : b_grid)
    if (!(b >= 0)) throw ConfigError("b_grid", "entries must be >= 0");

  const bool needs_b = experiment_id == ExperimentId::E2_alignment ||
                       experiment_id == ExperimentId::E3_adaptivity ||
                       experiment_id == ExperimentId::E4_sysid;
  if (needs_b && b_grid.empty()) throw ConfigError("b_grid", "must not be empty");
  if (needs_b && n < d) throw ConfigError("n", "must be >= d");

  if (experiment_id == ExperimentId::E1_denoise_bounds) {
    if (tau_grid.empty()) throw ConfigError("tau_grid", "must not be empty");
    for (double t : tau_grid)
      if (!(t > 0)) throw ConfigError("tau_grid", "entries must be > 0");
  }
  if (experiment_id == ExperimentId::E2_alignment) {
    for (int s : shifts)
      if (s < 0 || s > d) throw ConfigError("shifts", "entries must lie in [0, d]");
  }
  if (experiment_id == ExperimentId::E5_tightness) {
    if (n_grid.empty() && d_grid.empty()) throw ConfigError("n_grid", "n_grid and d_grid are both empty");
    for (int v : n_grid)
      if (v < d) throw ConfigError("n_grid", "entries must be >= d");
    for (int v : d_grid)
      if (v < r || v > n) throw ConfigError("d_grid", "entries must lie in [r, n]");
  }

  std::set<std::string> allowed{"lse", "rlse", "tlse", "nuclear", "tnuclear", "rsc"};
  if (experiment_id == ExperimentId::E1_denoise_bounds) allowed = {"svt"};
  if (include_estimators.empty()) throw ConfigError("include_estimators", "must not be empty");
  for (const auto& e : include_estimators)
    if (!allowed.count(e)) throw ConfigError("include_estimators", "unsupported estimator '" + e + "'");
  if (experiment_id == ExperimentId::E4_sysid &&
      std::count(include_estimators.begin(), include_estimators.end(), "tnuclear"))
    throw ConfigError("include_estimators", "tnuclear applies to regression only");
}

json ExperimentConfig::to_json() const {
  return json{
      {"experiment_id", to_string(experiment_id)},
      {"regime", regime_name(regime)},
      {"d", d},
      {"r", r},
      {"n", n},
      {"sigma", sigma},
      {"b_grid", b_grid},
      {"trials", trials},
      {"delta", delta},
      {"master_seed", master_seed},
      {"output_dir", output_dir.string()},
      {"include_estimators", include_estimators},
      {"workers", workers},
      {"tau_grid", tau_grid},
      {"n_grid", n_grid},
      {"d_grid", d_grid},
      {"shifts", shifts},
      {"covariance", covariance_name(covariance)},
      {"resample_design", resample_design},
  };
}

ExperimentConfig parse_config(ExperimentId id, const json& file, const json& overrides) {
  const json base = file.is_null() ? json::object() : file;
  check_experiment_key(id, base);
  check_experiment_key(id, overrides);
  Regime regime = Regime::low_rank;
  if (auto r = find_regime(base)) regime = *r;
  if (auto r = find_regime(overrides)) regime = *r;

  ExperimentConfig cfg = default_config(id, regime);
  apply_keys(cfg, base);
  apply_keys(cfg, overrides);
  cfg.validate();
  return cfg;
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "config file " + path.string() + " is not valid JSON: " + e.what());
  }
}

void apply_set_flag(json& overrides, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("", "--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
    throw ConfigError(key, "unknown key");
  json parsed = json::parse(value, nullptr, /*allow_exceptions=*/false);
  overrides[key] = parsed.is_discarded() ? json(value) : parsed;
}

}  // namespace rankadapt::bench
