// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "rankadapt/bench/experiment.hpp"
#include "rankadapt/bounds.hpp"
#include "rankadapt/estimators.hpp"
#include "rankadapt/problem_gen.hpp"
#include "rankadapt/rng.hpp"
#include "rankadapt/spectral.hpp"

using namespace rankadapt;
using namespace rankadapt::bench;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix random_stable(Rng& rng, Index d, double rho) {
  Matrix A = rng.gaussian_matrix(d, d);
  Eigen::EigenSolver<Matrix> es(A, false);
  return A * (rho / es.eigenvalues().cwiseAbs().maxCoeff());
}

double lambda_min(const Matrix& S) {
  const Vector ev = symmetric_eigenvalues(S);
  return ev(ev.size() - 1);
}

Outcome exact_recovery() {
  const Index d = 20;
  const Index r = 5;
  const Matrix A = make_target({d, r, 1, SpectrumOffset::j}, 1);
  const ProblemInstance inst = sample_regression(A, Matrix::Identity(d, d), 40, 0, 2);
  const double e_lse = (lse(inst.X, inst.Y) - A).norm();
  const double e_rlse = (r_lse(inst, r).A_hat - A).norm();
  const double e_tlse = (t_lse(inst).A_hat - A).norm();
  const double worst = std::max({e_lse, e_rlse, e_tlse});
  return {worst <= 1e-8, fmt("max ||A_hat - A||_F = %.3g (lse %.3g, rlse %.3g, tlse %.3g)", worst,
                             e_lse, e_rlse, e_tlse)};
}

Outcome lemma1_suite() {
  Rng rng(stream_seed(3, 0, Stream::perturbation));
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const Index d = 1 + Index(rng.uniform(0, 10));
    const Index rank = 1 + Index(rng.uniform(0, double(d)));
    const Matrix A = rng.gaussian_matrix(d, rank) * rng.gaussian_matrix(rank, d);
    const Matrix Z = rng.gaussian_matrix(d, d) * rng.uniform(0, 3);
    const Index k = Index(rng.uniform(0, double(d + 1)));
    violations += !lemma1_check(A + Z, A, std::min(k, d));
  }
  return {violations == 0, fmt("%d violations in 1000 cases", violations)};
}

Outcome theorem1_suite() {
  Rng rng(stream_seed(4, 0, Stream::perturbation));
  int violations = 0;
  double worst_ratio = 0;
  for (int t = 0; t < 10000; ++t) {
    const Index d = 2 + Index(rng.uniform(0, 9));
    const Index r = 1 + Index(rng.uniform(0, double(d)));
    const Matrix A = rng.gaussian_matrix(d, r) * rng.gaussian_matrix(r, d) * rng.uniform(0.05, 2);
    const Matrix Z = rng.gaussian_matrix(d, d) * rng.uniform(0.01, 1);
    const double xi = rng.uniform(2, 4) * operator_norm(Z);
    const double err = (hard_threshold(A + Z, xi) - A).squaredNorm();
    const double bound = theorem1_bound(singular_values(A), xi, r).value;
    violations += err > bound + 1e-9;
    worst_ratio = std::max(worst_ratio, err / bound);
  }
  return {violations == 0,
          fmt("%d violations in 10000 cases, max error/bound %.3g", violations, worst_ratio)};
}

Outcome denoise_comparison() {
  const ExperimentConfig cfg = parse_config(ExperimentId::E1_denoise_bounds, {{"workers", 0}});
  const ExperimentResult res = run_experiment(cfg);
  bool ok = res.failures.empty();
  std::string detail;
  for (double tau : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    bool found = false;
    for (const auto& row : res.e1) {
      if (row.tau != tau) continue;
      found = true;
      ok = ok && row.new_bound_mean < row.chatterjee_bound_mean;
      detail += fmt("tau=%g: %.4g < %.4g; ", tau, row.new_bound_mean, row.chatterjee_bound_mean);
    }
    ok = ok && found;
  }
  int outside = 0;
  for (const auto& s : res.e1_samples) {
    const double lo = cfg.r * s.z_op_norm_sq;
    const double hi = 18 * s.a_frob_sq;
    outside += s.new_bound < lo * (1 - 1e-12) || s.new_bound > hi * (1 + 1e-12);
  }
  ok = ok && outside == 0;
  return {ok, detail + fmt("%d samples outside [r||Z||^2, 18||A||_F^2]", outside)};
}

Outcome threshold_coverage() {
  const Index d = 20;
  const Index n = 500;
  const double sigma = 0.1;
  const double delta = 0.05;
  const int trials = 500;

  const Matrix A = make_target({d, 5, 1, SpectrumOffset::j}, 5);
  int covered_mr = 0;
  for (int t = 0; t < trials; ++t) {
    const ProblemInstance inst =
        sample_regression(A, Matrix::Identity(d, d), n, sigma, stream_seed(5, t, Stream::noise));
    const double z = operator_norm(lse(inst.X, inst.Y) - A);
    const double xi = threshold_mr(n, d, d, sigma, delta, lambda_min(empirical_covariance(inst.X)));
    covered_mr += 2 * z <= xi;
  }

  const Matrix S = make_stable_symmetric({d, 5, 1, SpectrumOffset::j_plus_1}, 6);
  const double burn_in = sysid_burn_in(gramian_infinite(S), sigma, delta, d);
  int covered_sysid = 0;
  for (int t = 0; t < trials; ++t) {
    const ProblemInstance inst = simulate_lti(S, n, sigma, stream_seed(6, t, Stream::noise));
    const double z = operator_norm(lse(inst.X, inst.Y) - S);
    const double xi = threshold_sysid(n, d, sigma, delta, lambda_min(empirical_covariance(inst.X)));
    covered_sysid += 2 * z <= xi;
  }
  const double f_mr = double(covered_mr) / trials;
  const double f_sysid = double(covered_sysid) / trials;
  const bool burn_in_holds = double(n) >= burn_in;
  return {f_mr >= 0.94 && burn_in_holds && f_sysid >= 0.94,
          fmt("regression %.3f, sysid %.3f (need >= 0.94; burn-in %.1f <= n=%ld)", f_mr, f_sysid,
              burn_in, long(n))};
}

Outcome tlse_upper_coverage() {
  const Index d = 20;
  const Index r = 5;
  const Index n = 500;
  const double sigma = 0.1;
  const double delta = 0.05;
  const int trials = 500;
  const Matrix A = make_target({d, r, 1, SpectrumOffset::j}, 7);
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    const ProblemInstance inst =
        sample_regression(A, Matrix::Identity(d, d), n, sigma, stream_seed(7, t, Stream::noise));
    TlseOptions opts;
    opts.delta = delta;
    const EstimateReport rep = t_lse(inst, opts);
    BoundInputs in;
    in.n = n;
    in.delta = delta;
    in.sigma = sigma;
    in.d_x = d;
    in.d_y = d;
    in.r = r;
    in.target_spectrum = singular_values(A);
    in.cov_spectrum = symmetric_eigenvalues(empirical_covariance(inst.X));
    ok += (rep.A_hat - A).squaredNorm() <= tlse_upper(in).value;
  }
  const double f = double(ok) / trials;
  return {f >= 0.94, fmt("coverage %.3f (need >= 0.94)", f)};
}

Outcome rank_recovery() {
  const Index d = 50;
  const Index r = 10;
  const int trials = 100;
  int exact = 0;
  for (int t = 0; t < trials; ++t) {
    const Matrix A = make_target({d, r, 0, SpectrumOffset::j}, stream_seed(8, t, Stream::target));
    const ProblemInstance inst =
        sample_regression(A, Matrix::Identity(d, d), 1000, 0.01, stream_seed(8, t, Stream::noise));
    exact += t_lse(inst).effective_rank == r;
  }
  const double f = double(exact) / trials;
  return {f >= 0.95, fmt("rank 10 recovered in %.2f of trials (need >= 0.95)", f)};
}

Outcome adaptivity_crossover() {
  const ExperimentResult res = run_experiment(parse_config(ExperimentId::E3_adaptivity, {{"workers", 0}}));
  std::map<std::pair<std::string, std::string>, SummaryRow> by;
  for (const auto& s : res.summary) by[{s.scenario, s.estimator}] = s;
  const auto get = [&](const char* sc, const char* est) { return by.at({sc, est}); };
  const SummaryRow t3 = get("b=3", "tlse");
  const SummaryRow r3 = get("b=3", "rlse");
  const SummaryRow t01 = get("b=0.1", "tlse");
  const SummaryRow r01 = get("b=0.1", "rlse");
  const double ratio = t01.mean_rel_error / r01.mean_rel_error;
  const bool ok = t3.mean_rel_error < r3.mean_rel_error && t3.mean_effective_rank <= 5 &&
                  ratio >= 0.5 && ratio <= 2;
  return {ok, fmt("b=3: tlse %.4g vs rlse %.4g, tlse rank %.2f; b=0.1 ratio %.3f",
                  t3.mean_rel_error, r3.mean_rel_error, t3.mean_effective_rank, ratio)};
}

Outcome alignment_decade() {
  const ExperimentResult res = run_experiment(parse_config(ExperimentId::E2_alignment, {{"workers", 0}}));
  for (const auto& row : res.e2_table) {
    if (row.estimator != "tlse") continue;
    return {row.error_avg >= 2e-8 && row.error_avg <= 2e-6,
            fmt("tlse mean relative error %.4g (need [2e-8, 2e-6])", row.error_avg)};
  }
  return {false, "no tlse row"};
}

ExperimentResult e5_result() {
  static const ExperimentResult res =
      run_experiment(parse_config(ExperimentId::E5_tightness, {{"workers", 0}}));
  return res;
}

Outcome inverse_n_scaling() {
  std::vector<double> x, y;
  for (const auto& row : e5_result().e5_bounds)
    if (row.sweep == "n") {
      x.push_back(std::log(double(row.n)));
      y.push_back(std::log(row.mean_frob_error_sq));
    }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {x.size() >= 2 && slope >= -1.15 && slope <= -0.85, fmt("slope %.4f", slope)};
}

Outcome linear_d_scaling() {
  std::vector<double> x, y;
  for (const auto& row : e5_result().e5_bounds)
    if (row.sweep == "d") {
      x.push_back(double(row.d));
      y.push_back(row.mean_frob_error_sq);
    }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / double(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double rho = sxy / std::sqrt(sxx * syy);
  return {x.size() >= 2 && rho >= 0.97, fmt("Pearson %.4f", rho)};
}

Outcome gramian_checks() {
  Rng rng(stream_seed(9, 0, Stream::perturbation));
  double worst_residual = 0;
  int sandwich_failures = 0;
  for (int t = 0; t < 100; ++t) {
    const Index d = 1 + Index(rng.uniform(0, 10));
    const Matrix A = random_stable(rng, d, rng.uniform(0.05, 0.9));
    const Matrix G = gramian_infinite(A);
    worst_residual = std::max(worst_residual, lyapunov_residual(A, G));
    const Index n0 = std::max<Index>(1, Index(std::ceil(gramian_average_min_samples(G))));
    for (Index n : {n0, n0 + 1, 2 * n0, 10 * n0}) {
      Matrix avg = Matrix::Zero(d, d);
      for (Index i = 0; i < n; ++i) avg += gramian_finite(A, i);
      avg /= double(n);
      sandwich_failures += symmetric_eigenvalues(avg - 0.25 * G).minCoeff() < -1e-9 ||
                           symmetric_eigenvalues(G - avg).minCoeff() < -1e-9;
    }
  }
  return {worst_residual <= 1e-10 && sandwich_failures == 0,
          fmt("max Lyapunov residual %.3g, %d sandwich failures", worst_residual, sandwich_failures)};
}

Outcome nuclear_solver() {
  Rng rng(stream_seed(10, 0, Stream::perturbation));
  int non_monotone = 0;
  double worst_gap = 0;
  for (int t = 0; t < 50; ++t) {
    const Index d = 2 + Index(rng.uniform(0, 5));
    const Matrix X = rng.gaussian_matrix(4 * d, d);
    const Matrix Y = rng.gaussian_matrix(4 * d, d);
    const double mu = rng.uniform(0.1, 5);
    const NuclearNormResult res = nuclear_norm_estimate(X, Y, mu);
    for (std::size_t i = 1; i < res.objective.size(); ++i)
      non_monotone += res.objective[i] > res.objective[i - 1] + 1e-12 * res.objective.front();
    SolverConfig ref_cfg;
    ref_cfg.max_iters = 100000;
    ref_cfg.rel_tol = std::numeric_limits<double>::min();
    const NuclearNormResult ref = nuclear_norm_estimate(X, Y, mu, ref_cfg);
    worst_gap = std::max(worst_gap, std::abs(nuclear_objective(X, Y, res.A_hat.transpose(), mu) -
                                             nuclear_objective(X, Y, ref.A_hat.transpose(), mu)));
  }
  return {non_monotone == 0 && worst_gap <= 1e-6,
          fmt("%d non-monotone steps, max gap to reference %.3g", non_monotone, worst_gap)};
}

Outcome covariance_concentration() {
  const Index d = 10;
  const double delta = 0.05;
  const Index n = Index(std::ceil(300 * (d + std::log(1 / delta))));
  const double radius = covariance_deviation_radius(d, std::uint64_t(n), delta);
  int ok = 0;
  for (int t = 0; t < 200; ++t) {
    const Matrix X = sample_design(Matrix::Identity(d, d), n, stream_seed(11, t, Stream::design));
    ok += (symmetric_eigenvalues(empirical_covariance(X)).array() - 1.0).abs().maxCoeff() <= radius;
  }
  const double f = ok / 200.0;
  return {f >= 0.9, fmt("bound holds in %.3f of trials (need >= 0.90)", f)};
}

Outcome determinism() {
  std::string detail;
  bool ok = true;
  for (auto id : {ExperimentId::E1_denoise_bounds, ExperimentId::E2_alignment,
                  ExperimentId::E3_adaptivity, ExperimentId::E4_sysid, ExperimentId::E5_tightness}) {
    const auto render = [&](int workers) {
      const ExperimentResult r =
          run_experiment(parse_config(id, {{"trials", 2}, {"workers", workers}, {"master_seed", 77}}));
      return render_csv(Schema::trials, to_records(r.trials)) +
             render_csv(Schema::summary, to_records(r.summary)) +
             render_csv(Schema::e1_bounds, to_records(r.e1)) +
             render_csv(Schema::e2_table, to_records(r.e2_table)) +
             render_csv(Schema::e5_bounds, to_records(r.e5_bounds));
    };
    const std::string one = render(1);
    const bool same = one == render(3) && one == render(8);
    ok = ok && same;
    detail += to_string(id).substr(0, 2) + (same ? " identical; " : " DIFFERS; ");
  }
  return {ok, detail};
}

struct Criterion {
  const char* name;
  double max_seconds;  // <= 0: no runtime limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"exact_recovery", 1, exact_recovery},
      {"lemma1_inequality", 5, lemma1_suite},
      {"theorem1_inequality", 30, theorem1_suite},
      {"denoising_bound_comparison", 60, denoise_comparison},
      {"threshold_coverage", 120, threshold_coverage},
      {"tlse_upper_bound_coverage", 120, tlse_upper_coverage},
      {"rank_recovery", 120, rank_recovery},
      {"adaptivity_crossover", 300, adaptivity_crossover},
      {"alignment_table_decade", 0, alignment_decade},
      {"inverse_n_scaling", 0, inverse_n_scaling},
      {"linear_d_scaling", 0, linear_d_scaling},
      {"gramian_correctness", 0, gramian_checks},
      {"nuclear_norm_solver", 0, nuclear_solver},
      {"covariance_concentration", 0, covariance_concentration},
      {"determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.max_seconds > 0 && secs >= c.max_seconds) {
      o.pass = false;
      o.detail += fmt("; runtime %.2fs over %.0fs", secs, c.max_seconds);
    }
    failed += !o.pass;
    std::printf("%s %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
