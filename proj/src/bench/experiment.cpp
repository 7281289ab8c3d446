#include "rankadapt/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "rankadapt/bounds.hpp"
#include "rankadapt/errors.hpp"
#include "rankadapt/estimators.hpp"
#include "rankadapt/problem_gen.hpp"
#include "rankadapt/rng.hpp"

#ifndef RANKADAPT_VERSION
#define RANKADAPT_VERSION "unknown"
#endif

namespace rankadapt::bench {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kShared = 0xffffffffULL;

std::uint64_t item_seed(std::uint64_t master, std::uint64_t scenario, std::uint64_t trial) {
  return stream_seed(master, (scenario << 32) | (trial & kShared), Stream::perturbation);
}

std::string label(const char* key, double v) { return std::string(key) + "=" + format_double(v); }

Matrix covariance_matrix(CovarianceKind kind, Index d) {
  Vector diag = Vector::Ones(d);
  if (kind == CovarianceKind::j_squared)
    for (Index j = 0; j < d; ++j) diag(j) = double((j + 1) * (j + 1));
  return diag.asDiagonal();
}

// Runs fn(i) for i in [0, count) on `workers` threads. fn must only write to
// its own slot.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn fn) {
  const std::size_t pool = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (pool == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < pool; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Scenario {
  std::string label;
  double b = 0;
  Index shift = 0;
  Index n = 0;
  Index d = 0;
  std::string sweep;
};

// Scenario-level state shared by all trials of a scenario.
struct Fixed {
  Matrix A;
  Matrix X;
  bool has_A = false;
  bool has_X = false;
};

struct ItemOutput {
  std::vector<TrialRow> rows;
  std::vector<TrialFailure> failures;
  std::vector<E1Sample> e1;
};

TrialRow failed_row(const ExperimentConfig& cfg, const Scenario& sc, int trial,
                    const std::string& est) {
  return TrialRow{to_string(cfg.experiment_id), sc.label, trial, est, kNaN, kNaN,
                  std::nullopt, std::nullopt};
}

void run_estimators(const ExperimentConfig& cfg, const Scenario& sc, int trial,
                    const ProblemInstance& inst, ItemOutput& out) {
  MethodParams params;
  params.rank = std::min<Index>(cfg.r, std::min(inst.d_x(), inst.d_y()));
  params.delta = cfg.delta;
  for (const auto& name : cfg.include_estimators) {
    try {
      const auto method = parse_method(name);
      if (!method) throw DomainError("unknown estimator " + name);
      const EstimateReport rep = run_estimator(*method, inst, params);
      const double fe = rep.frob_error.value_or(kNaN);
      out.rows.push_back(TrialRow{to_string(cfg.experiment_id), sc.label, trial, name,
                                  rep.relative_error.value_or(kNaN), fe * fe,
                                  static_cast<long>(rep.effective_rank), rep.threshold_used});
    } catch (const std::exception& e) {
      out.rows.push_back(failed_row(cfg, sc, trial, name));
      out.failures.push_back({sc.label, trial, name, e.what()});
    }
  }
}

void fail_all(const ExperimentConfig& cfg, const Scenario& sc, int trial, const std::string& msg,
              ItemOutput& out) {
  for (const auto& name : cfg.include_estimators) out.rows.push_back(failed_row(cfg, sc, trial, name));
  out.failures.push_back({sc.label, trial, "", msg});
}

std::vector<Scenario> make_scenarios(const ExperimentConfig& cfg) {
  std::vector<Scenario> out;
  switch (cfg.experiment_id) {
    case ExperimentId::E1_denoise_bounds:
      for (double tau : cfg.tau_grid) out.push_back({label("tau", tau), 0, 0, 0, cfg.d, ""});
      break;
    case ExperimentId::E2_alignment: {
      std::vector<int> shifts = cfg.shifts;
      if (shifts.empty())
        for (int s = 0; s <= cfg.d; ++s) shifts.push_back(s);
      for (int s : shifts)
        out.push_back({"shift=" + std::to_string(s), cfg.b_grid.front(), s, cfg.n, cfg.d, ""});
      break;
    }
    case ExperimentId::E3_adaptivity:
    case ExperimentId::E4_sysid:
      for (double b : cfg.b_grid) out.push_back({label("b", b), b, 0, cfg.n, cfg.d, ""});
      break;
    case ExperimentId::E5_tightness:
      for (int n : cfg.n_grid)
        out.push_back({"n=" + std::to_string(n) + ";d=" + std::to_string(cfg.d), 0, 0, n, cfg.d, "n"});
      for (int d : cfg.d_grid)
        out.push_back({"n=" + std::to_string(cfg.n) + ";d=" + std::to_string(d), 0, 0, cfg.n, d, "d"});
      break;
  }
  return out;
}

// E1: one item per trial; the same (A, Z) serves every tau.
void run_e1_trial(const ExperimentConfig& cfg, const std::vector<Scenario>& scenarios, int trial,
                  ItemOutput& out) {
  const std::uint64_t seed = item_seed(cfg.master_seed, kShared, trial);
  try {
    const Matrix A =
        truncate_rank(Rng(seed, 0, Stream::target).uniform_matrix(cfg.d, cfg.d, -1.0, 1.0), cfg.r);
    const Matrix Z = cfg.sigma * Rng(seed, 0, Stream::noise).gaussian_matrix(cfg.d, cfg.d);
    const Matrix Abar = A + Z;
    const Vector s_a = singular_values(A);
    const Vector s_abar = singular_values(Abar);
    const double z_norm = operator_norm(Z);
    const double a_nuc = s_a.sum();
    const double a_frob_sq = A.squaredNorm();
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      const double tau = cfg.tau_grid[i];
      const BoundValue adaptive = adaptive_denoise_bound(s_abar, s_a, z_norm, tau);
      out.e1.push_back({tau, trial, adaptive.value, chatterjee_bound(tau, z_norm, a_nuc),
                        z_norm * z_norm, a_frob_sq, static_cast<long>(adaptive.minimizer_k.value_or(0))});
      const double xi = (1 + tau) * z_norm;
      const Matrix est = hard_threshold(Abar, xi);
      const double err = (est - A).squaredNorm();
      out.rows.push_back(TrialRow{to_string(cfg.experiment_id), scenarios[i].label, trial, "svt",
                                  a_frob_sq > 0 ? err / a_frob_sq : kNaN, err,
                                  static_cast<long>(count_above(s_abar, xi)), xi});
    }
  } catch (const std::exception& e) {
    out.rows.clear();
    out.e1.clear();
    for (const auto& sc : scenarios) out.rows.push_back(failed_row(cfg, sc, trial, "svt"));
    out.failures.push_back({"", trial, "", e.what()});
  }
}

Fixed prepare_fixed(const ExperimentConfig& cfg, const Scenario& sc, std::size_t index,
                    const Matrix& shared_X) {
  Fixed f;
  const std::uint64_t seed = item_seed(cfg.master_seed, index, kShared);
  switch (cfg.experiment_id) {
    case ExperimentId::E2_alignment:
      if (!cfg.resample_design) {
        f.X = shared_X;
        f.has_X = true;
        f.A = make_aligned_target(f.X, {sc.d, cfg.r, sc.b, SpectrumOffset::j}, sc.shift, seed);
        f.has_A = true;
      }
      break;
    case ExperimentId::E3_adaptivity:
      if (!cfg.resample_design) {
        f.X = sample_design(covariance_matrix(cfg.covariance, sc.d), sc.n, seed);
        f.has_X = true;
      }
      break;
    case ExperimentId::E5_tightness:
      f.A = truncate_rank(Rng(seed, 0, Stream::target).uniform_matrix(sc.d, sc.d, 0.0, 1.0),
                          std::min<Index>(cfg.r, sc.d));
      f.has_A = true;
      if (!cfg.resample_design) {
        f.X = sample_design(covariance_matrix(cfg.covariance, sc.d), sc.n, seed);
        f.has_X = true;
      }
      break;
    default:
      break;
  }
  return f;
}

ProblemInstance make_instance(const ExperimentConfig& cfg, const Scenario& sc, const Fixed& fixed,
                              std::uint64_t seed) {
  const SpectrumProfile power{sc.d, cfg.r, sc.b, SpectrumOffset::j};
  switch (cfg.experiment_id) {
    case ExperimentId::E2_alignment: {
      if (fixed.has_A) return observe_regression(fixed.A, fixed.X, cfg.sigma, seed);
      const Matrix X = sample_design(covariance_matrix(cfg.covariance, sc.d), sc.n, seed);
      const Matrix A = make_aligned_target(X, power, sc.shift, seed);
      return observe_regression(A, X, cfg.sigma, seed);
    }
    case ExperimentId::E3_adaptivity: {
      const Matrix A = make_target(power, seed);
      if (fixed.has_X) return observe_regression(A, fixed.X, cfg.sigma, seed);
      return sample_regression(A, covariance_matrix(cfg.covariance, sc.d), sc.n, cfg.sigma, seed);
    }
    case ExperimentId::E4_sysid: {
      const Matrix A =
          make_stable_symmetric({sc.d, cfg.r, sc.b, SpectrumOffset::j_plus_1}, seed);
      return simulate_lti(A, sc.n, cfg.sigma, seed);
    }
    case ExperimentId::E5_tightness: {
      if (fixed.has_X) return observe_regression(fixed.A, fixed.X, cfg.sigma, seed);
      return sample_regression(fixed.A, covariance_matrix(cfg.covariance, sc.d), sc.n, cfg.sigma,
                               seed);
    }
    case ExperimentId::E1_denoise_bounds:
      break;
  }
  throw DomainError("no instance generator for " + to_string(cfg.experiment_id));
}

void summarize(const ExperimentConfig& cfg, const std::vector<Scenario>& scenarios,
               ExperimentResult& res) {
  std::vector<std::string> estimators = cfg.include_estimators;
  // rows are sorted by scenario then trial; gather per (scenario, estimator)
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& row : res.trials) {
    auto& g = groups[{row.scenario, row.estimator}];
    g.first.push_back(row.rel_error);
    g.second.push_back(row.effective_rank ? double(*row.effective_rank) : kNaN);
  }
  for (const auto& sc : scenarios) {
    for (const auto& est : estimators) {
      const auto it = groups.find({sc.label, est});
      if (it == groups.end()) continue;
      const Stats err = describe(it->second.first);
      const Stats rank = describe(it->second.second);
      res.summary.push_back(SummaryRow{to_string(cfg.experiment_id), sc.label, est, err.mean,
                                       err.std, err.max, rank.mean});
    }
  }
}

void finish_e1(const ExperimentConfig& cfg, ExperimentResult& res) {
  for (double tau : cfg.tau_grid) {
    std::vector<double> nb;
    std::vector<double> cb;
    for (const auto& s : res.e1_samples) {
      if (s.tau != tau) continue;
      nb.push_back(s.new_bound);
      cb.push_back(s.chatterjee_bound);
    }
    res.e1.push_back({tau, describe(nb).mean, describe(cb).mean});
  }
}

void finish_e2(const ExperimentConfig& cfg, ExperimentResult& res) {
  for (const auto& est : cfg.include_estimators) {
    std::vector<double> means;
    for (const auto& row : res.summary)
      if (row.estimator == est) means.push_back(row.mean_rel_error);
    const Stats s = describe(means);
    res.e2_table.push_back({to_string(cfg.experiment_id), est, s.mean, s.std, s.max});
  }
}

void finish_e5(const ExperimentConfig& cfg, const std::vector<Scenario>& scenarios,
               const std::vector<Fixed>& fixed, ExperimentResult& res) {
  const std::string est = std::count(cfg.include_estimators.begin(), cfg.include_estimators.end(),
                                     "tlse")
                              ? "tlse"
                              : cfg.include_estimators.front();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& sc = scenarios[i];
    std::vector<double> errs;
    for (const auto& row : res.trials)
      if (row.scenario == sc.label && row.estimator == est) errs.push_back(row.frob_error_sq);
    double upper = kNaN;
    try {
      BoundInputs in;
      in.n = static_cast<std::uint64_t>(sc.n);
      in.delta = cfg.delta;
      in.sigma = cfg.sigma;
      in.d_x = sc.d;
      in.d_y = sc.d;
      in.r = std::min<Index>(cfg.r, sc.d);
      in.target_spectrum = singular_values(fixed[i].A);
      in.cov_spectrum = fixed[i].has_X
                            ? symmetric_eigenvalues(empirical_covariance(fixed[i].X))
                            : symmetric_eigenvalues(covariance_matrix(cfg.covariance, sc.d));
      upper = tlse_upper(in).value;
    } catch (const std::exception& e) {
      res.failures.push_back({sc.label, -1, "tlse_upper", e.what()});
    }
    res.e5_bounds.push_back({sc.sweep, static_cast<long>(sc.n), static_cast<long>(sc.d),
                             describe(errs).mean, upper});
  }
}

}  // namespace

Stats describe(const std::vector<double>& values) {
  Stats s;
  double sum = 0;
  double max = -std::numeric_limits<double>::infinity();
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    max = std::max(max, v);
    ++s.count;
  }
  if (s.count == 0) return {kNaN, kNaN, kNaN, 0};
  s.mean = sum / double(s.count);
  s.max = max;
  if (s.count > 1) {
    double ss = 0;
    for (double v : values)
      if (!std::isnan(v)) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / double(s.count - 1));
  }
  return s;
}

std::string version_string() { return RANKADAPT_VERSION; }

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int workers =
      cfg.workers > 0 ? cfg.workers : std::max(1, int(std::thread::hardware_concurrency()));
  const std::vector<Scenario> scenarios = make_scenarios(cfg);
  ExperimentResult res;

  if (cfg.experiment_id == ExperimentId::E1_denoise_bounds) {
    std::vector<ItemOutput> slots(cfg.trials);
    parallel_for(slots.size(), workers,
                 [&](std::size_t t) { run_e1_trial(cfg, scenarios, int(t), slots[t]); });
    // scenario-major order, like the other experiments
    for (std::size_t i = 0; i < scenarios.size(); ++i)
      for (const auto& slot : slots) {
        if (slot.rows.size() == scenarios.size()) res.trials.push_back(slot.rows[i]);
      }
    for (const auto& slot : slots) {
      res.e1_samples.insert(res.e1_samples.end(), slot.e1.begin(), slot.e1.end());
      res.failures.insert(res.failures.end(), slot.failures.begin(), slot.failures.end());
    }
    std::stable_sort(res.e1_samples.begin(), res.e1_samples.end(),
                     [](const E1Sample& a, const E1Sample& b) { return a.tau < b.tau; });
    summarize(cfg, scenarios, res);
    finish_e1(cfg, res);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
  }

  Matrix shared_X;
  if (cfg.experiment_id == ExperimentId::E2_alignment && !cfg.resample_design)
    shared_X = sample_design(covariance_matrix(cfg.covariance, cfg.d), cfg.n,
                             item_seed(cfg.master_seed, kShared, kShared));

  std::vector<Fixed> fixed(scenarios.size());
  std::vector<std::string> fixed_error(scenarios.size());
  parallel_for(scenarios.size(), workers, [&](std::size_t i) {
    try {
      fixed[i] = prepare_fixed(cfg, scenarios[i], i, shared_X);
    } catch (const std::exception& e) {
      fixed_error[i] = e.what();
    }
  });

  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<ItemOutput> slots(scenarios.size() * trials);
  parallel_for(slots.size(), workers, [&](std::size_t item) {
    const std::size_t s = item / trials;
    const int t = int(item % trials);
    ItemOutput& out = slots[item];
    if (!fixed_error[s].empty()) {
      fail_all(cfg, scenarios[s], t, fixed_error[s], out);
      return;
    }
    try {
      const ProblemInstance inst =
          make_instance(cfg, scenarios[s], fixed[s], item_seed(cfg.master_seed, s, t));
      run_estimators(cfg, scenarios[s], t, inst, out);
    } catch (const std::exception& e) {
      fail_all(cfg, scenarios[s], t, e.what(), out);
    }
  });

  for (const auto& slot : slots) {
    res.trials.insert(res.trials.end(), slot.rows.begin(), slot.rows.end());
    res.failures.insert(res.failures.end(), slot.failures.begin(), slot.failures.end());
  }
  summarize(cfg, scenarios, res);
  if (cfg.experiment_id == ExperimentId::E2_alignment) finish_e2(cfg, res);
  if (cfg.experiment_id == ExperimentId::E5_tightness) finish_e5(cfg, scenarios, fixed, res);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

nlohmann::json make_manifest(const ExperimentConfig& cfg, const ExperimentResult& res) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : res.failures)
    failures.push_back(
        {{"scenario", f.scenario}, {"trial", f.trial}, {"estimator", f.estimator}, {"message", f.message}});
  return {
      {"config", cfg.to_json()},
      {"version", version_string()},
      {"duration_seconds", res.seconds},
      {"trial_rows", res.trials.size()},
      {"summary_rows", res.summary.size()},
      {"failures", failures},
  };
}

std::vector<std::filesystem::path> write_artifacts(const ExperimentConfig& cfg,
                                                   const ExperimentResult& res) {
  const auto& dir = cfg.output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto emit = [&](Schema s, const std::vector<Record>& rows, const char* name) {
    emit_csv(s, rows, dir / name);
    written.push_back(dir / name);
  };
  emit(Schema::trials, to_records(res.trials), kTrialsFile);
  emit(Schema::summary, to_records(res.summary), kSummaryFile);
  switch (cfg.experiment_id) {
    case ExperimentId::E1_denoise_bounds: emit(Schema::e1_bounds, to_records(res.e1), kE1File); break;
    case ExperimentId::E2_alignment: emit(Schema::e2_table, to_records(res.e2_table), kE2File); break;
    case ExperimentId::E5_tightness: emit(Schema::e5_bounds, to_records(res.e5_bounds), kE5File); break;
    default: break;
  }

  nlohmann::json manifest = make_manifest(cfg, res);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& p : written) files.push_back(p.filename().string());
  manifest["files"] = files;
  const auto path = dir / kManifestFile;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << manifest.dump(2) << '\n';
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
  written.push_back(path);
  return written;
}

}  // namespace rankadapt::bench
