#include "rankadapt/problem_gen.hpp"

#include "rankadapt/errors.hpp"
#include "rankadapt/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>

namespace rankadapt {

std::string_view to_string(Setting s) {
  return s == Setting::regression ? "regression" : "sysid";
}

void SpectrumProfile::validate() const {
  if (d < 1) throw DomainError("spectrum profile: d must be >= 1");
  if (r < 1 || r > d) throw DomainError("spectrum profile: need 1 <= r <= d");
  if (!(b >= 0) || !std::isfinite(b)) throw DomainError("spectrum profile: b must be finite and >= 0");
}

Vector SpectrumProfile::values() const {
  validate();
  Vector s = Vector::Zero(d);
  const double shift = offset == SpectrumOffset::j ? 0.0 : 1.0;
  for (Index j = 1; j <= r; ++j) s(j - 1) = std::pow(static_cast<double>(j) + shift, -b);
  return s;
}

namespace {

// Left/right singular bases of a d x d Uniform[0,1] matrix.
SvdFactors uniform_basis(Index d, std::uint64_t seed) {
  Rng rng(seed, 0, Stream::target);
  return svd(rng.uniform_matrix(d, d, 0.0, 1.0));
}

}  // namespace

Matrix make_target(const SpectrumProfile& profile, std::uint64_t seed) {
  const Vector s = profile.values();
  const SvdFactors basis = uniform_basis(profile.d, seed);
  return basis.U * s.asDiagonal() * basis.V.transpose();
}

Matrix make_aligned_target(const Matrix& X, const SpectrumProfile& profile, Index shift,
                           std::uint64_t seed) {
  const Vector s = profile.values();
  const Index d = profile.d;
  if (X.cols() != d) throw DomainError("make_aligned_target: X must have d columns");
  if (shift < 0 || shift > d) throw DomainError("make_aligned_target: shift must lie in [0, d]");
  const SvdFactors xf = svd(X);
  if (xf.s.size() < d || numerical_rank(xf.s) < d)
    throw DomainError("make_aligned_target: X is not of full column rank");

  // Rows of P F^T, i.e. columns of F P^T.
  Matrix shifted(d, d);
  for (Index i = 0; i < d; ++i) shifted.col(i) = xf.V.col((i + shift) % d);

  const SvdFactors basis = uniform_basis(d, seed);
  return basis.U * s.asDiagonal() * shifted.transpose();
}

Matrix make_stable_symmetric(const SpectrumProfile& profile, std::uint64_t seed) {
  if (profile.offset != SpectrumOffset::j_plus_1)
    throw DomainError("make_stable_symmetric: profile must use the 1/(j+1)^b law");
  const Vector s = profile.values();
  const SvdFactors basis = uniform_basis(profile.d, seed);
  const Matrix A = basis.U * s.asDiagonal() * basis.U.transpose();
  return 0.5 * (A + A.transpose());
}

Matrix sample_design(const Matrix& Sigma, Index n, std::uint64_t seed) {
  require_square(Sigma, "sample_design");
  require_finite(Sigma, "sample_design");
  if (n < 1) throw DomainError("sample_design: n must be >= 1");
  Eigen::LLT<Matrix> llt(Sigma);
  if (llt.info() != Eigen::Success) throw DomainError("sample_design: covariance is not positive definite");
  const Matrix L = llt.matrixL();
  Rng rng(seed, 0, Stream::design);
  return rng.gaussian_matrix(n, Sigma.rows()) * L.transpose();
}

ProblemInstance observe_regression(const Matrix& A, const Matrix& X, double sigma,
                                   std::uint64_t seed) {
  if (A.cols() != X.cols()) throw DomainError("observe_regression: A and X disagree on d_x");
  if (!(sigma >= 0)) throw DomainError("observe_regression: sigma must be >= 0");
  Rng rng(seed, 0, Stream::noise);
  ProblemInstance inst;
  inst.A = A;
  inst.X = X;
  inst.Y = X * A.transpose();
  if (sigma > 0) inst.Y += sigma * rng.gaussian_matrix(X.rows(), A.rows());
  inst.sigma = sigma;
  inst.setting = Setting::regression;
  inst.seed = seed;
  return inst;
}

ProblemInstance sample_regression(const Matrix& A, const Matrix& Sigma, Index n, double sigma,
                                  std::uint64_t seed) {
  if (Sigma.rows() != A.cols()) throw DomainError("sample_regression: Sigma must be d_x x d_x");
  if (n < A.cols()) throw DomainError("sample_regression: need n >= d_x");
  ProblemInstance inst = observe_regression(A, sample_design(Sigma, n, seed), sigma, seed);
  inst.covariance = Sigma;
  return inst;
}

ProblemInstance simulate_lti(const Matrix& A, Index n, double sigma, std::uint64_t seed) {
  require_square(A, "simulate_lti");
  if (n < 1) throw DomainError("simulate_lti: n must be >= 1");
  if (!(sigma >= 0)) throw DomainError("simulate_lti: sigma must be >= 0");
  if (spectral_radius(A) >= 1.0)
    throw NumericalError("simulate_lti: A is not stable (spectral radius >= 1)");

  const Index d = A.rows();
  Rng rng(seed, 0, Stream::noise);
  Matrix traj = Matrix::Zero(n + 1, d);
  Vector eta(d);
  for (Index t = 0; t < n; ++t) {
    for (Index i = 0; i < d; ++i) eta(i) = rng.gaussian();
    traj.row(t + 1) = (A * traj.row(t).transpose() + sigma * eta).transpose();
  }

  ProblemInstance inst;
  inst.A = A;
  inst.X = traj.topRows(n);
  inst.Y = traj.bottomRows(n);
  inst.sigma = sigma;
  inst.setting = Setting::sysid;
  inst.seed = seed;
  return inst;
}

Matrix empirical_covariance(const Matrix& X) {
  if (X.rows() < 1) throw DomainError("empirical_covariance: need at least one row");
  Matrix S = X.transpose() * X / static_cast<double>(X.rows());
  return 0.5 * (S + S.transpose());
}

Matrix lti_expected_covariance(const Matrix& A, Index n, double sigma) {
  require_square(A, "lti_expected_covariance");
  if (n < 1) throw DomainError("lti_expected_covariance: n must be >= 1");
  const Index d = A.rows();
  Matrix sum = Matrix::Zero(d, d);
  Matrix gramian = Matrix::Identity(d, d);
  Matrix power = Matrix::Identity(d, d);
  // Rows 2..n of X have covariance sigma^2 Gamma_0 .. sigma^2 Gamma_{n-2}.
  for (Index i = 0; i <= n - 2; ++i) {
    if (i > 0) {
      power = A * power;
      const Matrix term = power * power.transpose();
      gramian += term;
      if (term.norm() <= 1e-18 * gramian.norm()) {
        // Gramian has converged to working precision; remaining terms repeat it.
        sum += static_cast<double>(n - 1 - i) * gramian;
        break;
      }
    }
    sum += gramian;
  }
  return sigma * sigma * sum / static_cast<double>(n);
}

}  // namespace rankadapt
