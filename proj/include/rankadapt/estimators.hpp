#pragma once

// Estimators of A from (X, Y) with Y = X A^T + E:
//   lse                    least squares through the pseudo-inverse
//   r_lse                  best rank-r approximation of the LSE
//   t_lse                  LSE with data-driven singular value hard thresholding
//   nuclear_norm_estimate  nuclear-norm penalized least squares (proximal gradient)
//   thresholded_nuclear    hard-thresholded nuclear-norm estimate
//   rsc_baseline           rank selection on the fitted predictions
//
// Shapes: X is n x d_x, Y is n x d_y, every estimate is d_y x d_x.

#include <optional>
#include <string>
#include <vector>

#include "rankadapt/problem_gen.hpp"
#include "rankadapt/spectral.hpp"

namespace rankadapt {

struct EstimateReport {
  Matrix A_hat;
  Index effective_rank = 0;
  std::optional<double> threshold_used;
  /// ||A_hat - A||_F and ||A_hat - A||_F^2 / ||A||_F^2; filled by score().
  std::optional<double> frob_error;
  std::optional<double> relative_error;
};

/// Builds a report for an estimate (effective rank at the default tolerance).
EstimateReport make_report(Matrix A_hat, std::optional<double> threshold = std::nullopt);

/// Fills the error fields against the true matrix. For A = 0 the relative
/// error is 0 when the estimate is exact and +inf otherwise.
void score(EstimateReport& report, const Matrix& truth);

struct SolverConfig {
  int max_iters = 5000;
  double rel_tol = 1e-9;
  double step_scale = 1.0;

  void validate() const;
};

/// Count of s_i(M) > rel_tol * s_1(M); 0 for the zero matrix.
Index effective_rank(const Matrix& M, double rel_tol = kRankTol);

/// Abar = (Y^T X)(X^T X)^+, computed as (X^+ Y)^T through a thin SVD of X.
/// Rank-deficient designs give the minimum-norm solution.
Matrix lse(const Matrix& X, const Matrix& Y);

/// Pi_r(lse(X, Y)); r = 0 gives the zero estimate.
EstimateReport r_lse(const Matrix& X, const Matrix& Y, Index r);
EstimateReport r_lse(const ProblemInstance& inst, Index r);

/// 2 sigma (sqrt(d_x) + sqrt(d_y) + sqrt(log(1/delta))) / sqrt(n lambda_min).
double threshold_mr(Index n, Index d_x, Index d_y, double sigma, double delta,
                    double lambda_min_hat);

/// 2 sigma sqrt((d_x + log(1/delta)) / (n lambda_min)).
double threshold_sysid(Index n, Index d_x, double sigma, double delta, double lambda_min_hat);

struct TlseOptions {
  double delta = 0.05;
  /// When set, the threshold uses this covariance's smallest eigenvalue
  /// instead of that of the empirical covariance.
  std::optional<Matrix> population_covariance;
};

/// Hard-thresholded LSE. The threshold is threshold_mr or threshold_sysid by
/// instance setting. Throws NumericalError when the covariance used for the
/// threshold is singular.
EstimateReport t_lse(const ProblemInstance& inst, const TlseOptions& opts = {});

struct NuclearNormResult {
  Matrix A_hat;                    // d_y x d_x
  std::vector<double> objective;   // objective before the first step and after each step
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;         // X == 0: nothing to fit, zero returned
};

/// ||Y - X B||_F^2 + mu ||B||_* at B (d_x x d_y).
double nuclear_objective(const Matrix& X, const Matrix& Y, const Matrix& B, double mu);

/// Minimizes ||Y - X B||_F^2 + mu ||B||_* by proximal gradient from B = 0 with
/// step eta = step_scale / (2 lambda_max(X^T X)). Stops when the relative
/// objective change falls to cfg.rel_tol or after cfg.max_iters steps.
/// Returns B^T so the estimate is d_y x d_x like the others.
NuclearNormResult nuclear_norm_estimate(const Matrix& X, const Matrix& Y, double mu,
                                        const SolverConfig& cfg = {});

/// mu = 10 sigma sqrt(lambda_max) (sqrt((d_x + d_y)/n) + sqrt(log(1/(2 delta)) / (2n))).
double nuclear_mu(Index n, Index d_x, Index d_y, double sigma, double delta, double lambda_max_hat);

/// Nuclear-norm estimate hard-thresholded at xi = 2 mu / lambda_min(Sigma_hat).
/// Regression instances only.
EstimateReport thresholded_nuclear(const ProblemInstance& inst, double delta,
                                   const SolverConfig& cfg = {});

/// RSC penalty level 2 sigma (sqrt(d_y) + sqrt(rank(X))).
double rsc_threshold(Index d_y, Index rank_x, double sigma);

/// Rank selection on M = X lse(X, Y)^T: keep k = #{s_i(M) > rsc_threshold}
/// and map Pi_k(M) back through the pseudo-inverse of X. `delta` does not
/// enter the penalty; it is accepted for interface symmetry with t_lse.
EstimateReport rsc_baseline(const Matrix& X, const Matrix& Y, double sigma, double delta = 0.05);
EstimateReport rsc_baseline(const ProblemInstance& inst, double delta = 0.05);

/// Estimator names accepted by run_estimator and the CLI.
enum class Method { lse, rlse, tlse, nuclear, tnuclear, rsc };

std::optional<Method> parse_method(const std::string& name);
std::string to_string(Method m);

struct MethodParams {
  Index rank = 0;  // required by rlse
  double delta = 0.05;
  double mu = -1;  // nuclear: negative selects nuclear_mu()
  SolverConfig solver;
};

/// Dispatches to the named estimator and scores it against inst.A.
EstimateReport run_estimator(Method m, const ProblemInstance& inst, const MethodParams& params);

}  // namespace rankadapt
