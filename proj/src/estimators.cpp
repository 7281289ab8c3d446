#include "rankadapt/estimators.hpp"

#include "rankadapt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rankadapt {

namespace {

void require_xy(const Matrix& X, const Matrix& Y, const char* what) {
  if (X.rows() != Y.rows())
    throw DomainError(std::string(what) + ": X and Y must have the same number of rows");
  if (X.rows() < 1) throw DomainError(std::string(what) + ": need n >= 1");
  require_finite(X, what);
  require_finite(Y, what);
}

// X^+ B through the thin SVD of X, dropping singular values at or below the
// rank tolerance.
Matrix pinv_apply(const SvdFactors& xf, const Matrix& B) {
  const Index k = numerical_rank(xf.s);
  if (k == 0) return Matrix::Zero(xf.V.rows(), B.cols());
  const Vector inv = xf.s.head(k).cwiseInverse();
  return xf.V.leftCols(k) * inv.asDiagonal() * (xf.U.leftCols(k).transpose() * B);
}

struct CovarianceExtremes {
  double lambda_min;
  double lambda_max;
};

CovarianceExtremes covariance_extremes(const Matrix& S) {
  const Vector ev = symmetric_eigenvalues(S);
  return {ev(ev.size() - 1), ev(0)};
}

void require_nonsingular(const CovarianceExtremes& c, const char* what) {
  if (!(c.lambda_min > kRankTol * std::max(c.lambda_max, 0.0)) || !(c.lambda_min > 0)) {
    throw NumericalError(std::string(what) +
                         ": covariance is singular (lambda_min = " + std::to_string(c.lambda_min) +
                         "); the design does not identify A");
  }
}

void require_threshold_args(double sigma, double delta, double lambda_min, const char* what) {
  if (!(sigma >= 0)) throw DomainError(std::string(what) + ": sigma must be >= 0");
  if (!(delta > 0 && delta < 1)) throw DomainError(std::string(what) + ": delta must lie in (0, 1)");
  if (!(lambda_min > 0))
    throw NumericalError(std::string(what) + ": singular design (lambda_min <= 0)");
}

}  // namespace

EstimateReport make_report(Matrix A_hat, std::optional<double> threshold) {
  EstimateReport rep;
  rep.effective_rank = effective_rank(A_hat);
  rep.A_hat = std::move(A_hat);
  rep.threshold_used = threshold;
  return rep;
}

void score(EstimateReport& report, const Matrix& truth) {
  if (report.A_hat.rows() != truth.rows() || report.A_hat.cols() != truth.cols())
    throw DomainError("score: estimate and truth differ in shape");
  const double err = (report.A_hat - truth).norm();
  const double scale = truth.squaredNorm();
  report.frob_error = err;
  if (scale > 0) {
    report.relative_error = err * err / scale;
  } else {
    report.relative_error = err == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw DomainError("solver: max_iters must be >= 1");
  if (!(rel_tol >= 0)) throw DomainError("solver: rel_tol must be >= 0");
  if (!(step_scale > 0 && step_scale <= 1)) throw DomainError("solver: step_scale must lie in (0, 1]");
}

Index effective_rank(const Matrix& M, double rel_tol) {
  if (M.size() == 0) return 0;
  return numerical_rank(singular_values(M), rel_tol);
}

Matrix lse(const Matrix& X, const Matrix& Y) {
  require_xy(X, Y, "lse");
  return pinv_apply(svd(X), Y).transpose();
}

EstimateReport r_lse(const Matrix& X, const Matrix& Y, Index r) {
  require_xy(X, Y, "r_lse");
  if (r < 0 || r > std::min(X.cols(), Y.cols()))
    throw DomainError("r_lse: rank must lie in [0, min(d_x, d_y)]");
  return make_report(truncate_rank(lse(X, Y), r));
}

EstimateReport r_lse(const ProblemInstance& inst, Index r) {
  EstimateReport rep = r_lse(inst.X, inst.Y, r);
  score(rep, inst.A);
  return rep;
}

double threshold_mr(Index n, Index d_x, Index d_y, double sigma, double delta,
                    double lambda_min_hat) {
  require_threshold_args(sigma, delta, lambda_min_hat, "threshold_mr");
  if (n < 1) throw DomainError("threshold_mr: n must be >= 1");
  const double width = std::sqrt(static_cast<double>(d_x)) + std::sqrt(static_cast<double>(d_y)) +
                       std::sqrt(std::log(1.0 / delta));
  return 2.0 * sigma * width / std::sqrt(static_cast<double>(n) * lambda_min_hat);
}

double threshold_sysid(Index n, Index d_x, double sigma, double delta, double lambda_min_hat) {
  require_threshold_args(sigma, delta, lambda_min_hat, "threshold_sysid");
  if (n < 1) throw DomainError("threshold_sysid: n must be >= 1");
  return 2.0 * sigma *
         std::sqrt((static_cast<double>(d_x) + std::log(1.0 / delta)) /
                   (static_cast<double>(n) * lambda_min_hat));
}

EstimateReport t_lse(const ProblemInstance& inst, const TlseOptions& opts) {
  require_xy(inst.X, inst.Y, "t_lse");
  const Matrix& cov_source = opts.population_covariance ? *opts.population_covariance
                                                        : empirical_covariance(inst.X);
  const CovarianceExtremes c = covariance_extremes(cov_source);
  require_nonsingular(c, "t_lse");

  const double xi = inst.setting == Setting::regression
                        ? threshold_mr(inst.n(), inst.d_x(), inst.d_y(), inst.sigma, opts.delta,
                                       c.lambda_min)
                        : threshold_sysid(inst.n(), inst.d_x(), inst.sigma, opts.delta,
                                          c.lambda_min);
  EstimateReport rep = make_report(hard_threshold(lse(inst.X, inst.Y), xi), xi);
  score(rep, inst.A);
  return rep;
}

double nuclear_objective(const Matrix& X, const Matrix& Y, const Matrix& B, double mu) {
  return (Y - X * B).squaredNorm() + mu * nuclear_norm(B);
}

NuclearNormResult nuclear_norm_estimate(const Matrix& X, const Matrix& Y, double mu,
                                        const SolverConfig& cfg) {
  require_xy(X, Y, "nuclear_norm_estimate");
  if (!(mu >= 0)) throw DomainError("nuclear_norm_estimate: mu must be >= 0");
  cfg.validate();

  const Index dx = X.cols();
  const Index dy = Y.cols();
  NuclearNormResult out;
  const double yy = Y.squaredNorm();
  out.objective.push_back(yy);

  const Matrix G = X.transpose() * X;
  const Matrix C = X.transpose() * Y;
  const double lmax = symmetric_eigenvalues(G)(0);
  if (!(lmax > 0)) {
    out.degenerate = true;
    out.converged = true;
    out.A_hat = Matrix::Zero(dy, dx);
    return out;
  }

  const double eta = cfg.step_scale / (2.0 * lmax);
  const double shrink = eta * mu;
  Matrix B = Matrix::Zero(dx, dy);
  double f_prev = yy;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Matrix step = B - eta * 2.0 * (G * B - C);
    const SvdFactors f = svd(step);
    const Vector s = (f.s.array() - shrink).cwiseMax(0.0).matrix();
    const Index keep = count_above(s, 0.0);
    B = keep ? Matrix(f.U.leftCols(keep) * s.head(keep).asDiagonal() * f.V.leftCols(keep).transpose())
             : Matrix::Zero(dx, dy);

    // ||Y - XB||^2 expanded through the Gram matrices.
    const double smooth = yy - 2.0 * (B.array() * C.array()).sum() + (B.array() * (G * B).array()).sum();
    const double f_now = std::max(smooth, 0.0) + mu * s.sum();
    out.objective.push_back(f_now);
    out.iterations = it + 1;
    const double scale = std::max(std::abs(f_prev), std::numeric_limits<double>::min());
    if (std::abs(f_prev - f_now) <= cfg.rel_tol * scale) {
      out.converged = true;
      break;
    }
    f_prev = f_now;
  }
  out.A_hat = B.transpose();
  return out;
}

double nuclear_mu(Index n, Index d_x, Index d_y, double sigma, double delta, double lambda_max_hat) {
  if (!(sigma >= 0)) throw DomainError("nuclear_mu: sigma must be >= 0");
  if (!(delta > 0 && delta < 0.5)) throw DomainError("nuclear_mu: delta must lie in (0, 1/2)");
  if (n < 1) throw DomainError("nuclear_mu: n must be >= 1");
  const double nd = static_cast<double>(n);
  return 10.0 * sigma * std::sqrt(std::max(lambda_max_hat, 0.0)) *
         (std::sqrt(static_cast<double>(d_x + d_y) / nd) +
          std::sqrt(std::log(1.0 / (2.0 * delta)) / (2.0 * nd)));
}

EstimateReport thresholded_nuclear(const ProblemInstance& inst, double delta,
                                   const SolverConfig& cfg) {
  if (inst.setting != Setting::regression)
    throw DomainError("thresholded_nuclear: regression instances only");
  require_xy(inst.X, inst.Y, "thresholded_nuclear");
  const CovarianceExtremes c = covariance_extremes(empirical_covariance(inst.X));
  require_nonsingular(c, "thresholded_nuclear");

  const double mu = nuclear_mu(inst.n(), inst.d_x(), inst.d_y(), inst.sigma, delta, c.lambda_max);
  const double xi = 2.0 * mu / c.lambda_min;
  const NuclearNormResult nn = nuclear_norm_estimate(inst.X, inst.Y, mu, cfg);
  EstimateReport rep = make_report(hard_threshold(nn.A_hat, xi), xi);
  score(rep, inst.A);
  return rep;
}

double rsc_threshold(Index d_y, Index rank_x, double sigma) {
  return 2.0 * sigma * (std::sqrt(static_cast<double>(d_y)) + std::sqrt(static_cast<double>(rank_x)));
}

EstimateReport rsc_baseline(const Matrix& X, const Matrix& Y, double sigma,
                            [[maybe_unused]] double delta) {
  require_xy(X, Y, "rsc_baseline");
  if (!(sigma >= 0)) throw DomainError("rsc_baseline: sigma must be >= 0");
  const SvdFactors xf = svd(X);
  const Matrix fitted = X * pinv_apply(xf, Y);  // projection of Y onto range(X)
  const double mu = rsc_threshold(Y.cols(), numerical_rank(xf.s), sigma);
  const SvdFactors mf = svd(fitted);
  const Matrix kept = mf.reconstruct(count_above(mf.s, mu));
  return make_report(pinv_apply(xf, kept).transpose(), mu);
}

EstimateReport rsc_baseline(const ProblemInstance& inst, double delta) {
  EstimateReport rep = rsc_baseline(inst.X, inst.Y, inst.sigma, delta);
  score(rep, inst.A);
  return rep;
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "lse") return Method::lse;
  if (name == "rlse") return Method::rlse;
  if (name == "tlse") return Method::tlse;
  if (name == "nuclear") return Method::nuclear;
  if (name == "tnuclear") return Method::tnuclear;
  if (name == "rsc") return Method::rsc;
  return std::nullopt;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::lse: return "lse";
    case Method::rlse: return "rlse";
    case Method::tlse: return "tlse";
    case Method::nuclear: return "nuclear";
    case Method::tnuclear: return "tnuclear";
    case Method::rsc: return "rsc";
  }
  return "unknown";
}

EstimateReport run_estimator(Method m, const ProblemInstance& inst, const MethodParams& params) {
  EstimateReport rep;
  switch (m) {
    case Method::lse:
      rep = make_report(lse(inst.X, inst.Y));
      break;
    case Method::rlse:
      return r_lse(inst, params.rank);
    case Method::tlse:
      return t_lse(inst, TlseOptions{params.delta, std::nullopt});
    case Method::nuclear: {
      double mu = params.mu;
      if (mu < 0) {
        const CovarianceExtremes c = covariance_extremes(empirical_covariance(inst.X));
        mu = nuclear_mu(inst.n(), inst.d_x(), inst.d_y(), inst.sigma, params.delta, c.lambda_max);
      }
      rep = make_report(nuclear_norm_estimate(inst.X, inst.Y, mu, params.solver).A_hat);
      break;
    }
    case Method::tnuclear:
      return thresholded_nuclear(inst, params.delta, params.solver);
    case Method::rsc:
      return rsc_baseline(inst, params.delta);
  }
  score(rep, inst.A);
  return rep;
}

}  // namespace rankadapt
