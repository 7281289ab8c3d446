#include "rankadapt/spectral.hpp"

#include "rankadapt/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace rankadapt {

Matrix SvdFactors::reconstruct(Index k) const {
  k = std::clamp<Index>(k, 0, s.size());
  if (k == 0) return Matrix::Zero(U.rows(), V.rows());
  return U.leftCols(k) * s.head(k).asDiagonal() * V.leftCols(k).transpose();
}

void require_finite(const Matrix& M, const char* what) {
  if (!M.allFinite()) throw DomainError(std::string(what) + ": matrix has non-finite entries");
}

void require_square(const Matrix& M, const char* what) {
  if (M.rows() != M.cols()) {
    throw DomainError(std::string(what) + ": expected a square matrix, got " +
                      std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
}

SvdFactors svd(const Matrix& M) {
  require_finite(M, "svd");
  Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) throw NumericalError("svd: factorization did not converge");
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

Vector singular_values(const Matrix& M) {
  require_finite(M, "singular_values");
  Eigen::BDCSVD<Matrix> dec(M);
  if (dec.info() != Eigen::Success) throw NumericalError("svd: factorization did not converge");
  return dec.singularValues();
}

Matrix truncate_rank(const Matrix& M, Index k) {
  if (k < 0) throw DomainError("truncate_rank: k must be nonnegative");
  if (k == 0) return Matrix::Zero(M.rows(), M.cols());
  return svd(M).reconstruct(k);
}

Index count_above(const Vector& s, double xi) {
  return static_cast<Index>(std::count_if(s.begin(), s.end(), [xi](double v) { return v > xi; }));
}

Matrix hard_threshold(const Matrix& M, double xi) {
  if (!(xi >= 0)) throw DomainError("hard_threshold: threshold must be >= 0");
  const SvdFactors f = svd(M);
  return f.reconstruct(count_above(f.s, xi));
}

Index numerical_rank(const Vector& s, double rel_tol) {
  if (s.size() == 0 || s(0) <= 0) return 0;
  return count_above(s, rel_tol * s(0));
}

double operator_norm(const Matrix& M) {
  const Vector s = singular_values(M);
  return s.size() ? s(0) : 0.0;
}

double nuclear_norm(const Matrix& M) { return singular_values(M).sum(); }

Vector symmetric_eigenvalues(const Matrix& S) {
  require_square(S, "symmetric_eigenvalues");
  require_finite(S, "symmetric_eigenvalues");
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw DomainError("symmetric_eigenvalues: input is not symmetric");
  const Matrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  return es.eigenvalues().reverse();
}

SpectralSummary spectral_summary(const Vector& ev, Index k) {
  const Index d = ev.size();
  if (k < 1 || k > d) throw DomainError("spectral_summary: need 1 <= k <= dim");
  if (ev.minCoeff() < 0) throw DomainError("spectral_summary: negative eigenvalue");

  SpectralSummary out;
  out.lambda_bar_k = ev.head(k).mean();
  out.lambda_under_k = ev.tail(k).mean();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (ev(d - 1) == 0) {
    // Harmonic mean of a block containing a zero is zero; kappa is unbounded.
    out.singular = true;
    out.lambda_harmonic_k = 0;
    out.kappa = inf;
  } else {
    out.lambda_harmonic_k = static_cast<double>(k) / ev.tail(k).cwiseInverse().sum();
    out.kappa = ev(0) / ev(d - 1);
  }
  return out;
}

SpectralSummary spectral_summary(const Matrix& S, Index k) {
  Vector ev = symmetric_eigenvalues(S);
  // Round-off can push zero eigenvalues of a PSD input slightly negative.
  const double floor = -1e-12 * std::max(1.0, std::abs(ev(0)));
  if (ev.minCoeff() < floor) throw DomainError("spectral_summary: matrix is not PSD");
  ev = ev.cwiseMax(0.0);
  return spectral_summary(ev, k);
}

double spectral_radius(const Matrix& A) {
  require_square(A, "spectral_radius");
  require_finite(A, "spectral_radius");
  if (A.size() == 0) return 0;
  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_radius: eigensolver did not converge");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix gramian_finite(const Matrix& A, Index p) {
  require_square(A, "gramian_finite");
  if (p < 0) throw DomainError("gramian_finite: p must be nonnegative");
  const Index d = A.rows();
  Matrix power = Matrix::Identity(d, d);
  Matrix sum = Matrix::Identity(d, d);
  for (Index k = 1; k <= p; ++k) {
    power = A * power;
    sum.noalias() += power * power.transpose();
  }
  return sum;
}

double lyapunov_residual(const Matrix& A, const Matrix& G) {
  return (A * G * A.transpose() + Matrix::Identity(A.rows(), A.cols()) - G).norm();
}

Matrix gramian_infinite(const Matrix& A, double tol) {
  require_square(A, "gramian_infinite");
  require_finite(A, "gramian_infinite");
  if (!(tol > 0)) throw DomainError("gramian_infinite: tol must be positive");
  const double rho = spectral_radius(A);
  if (rho >= 1.0 - 1e-8) {
    throw NumericalError("gramian_infinite: system is not stable (spectral radius " +
                         std::to_string(rho) + ")");
  }

  // After j doublings G = Gamma_{2^j - 1}(A) and Ak = A^{2^j}.
  constexpr int kMaxDoublings = 64;
  const Index d = A.rows();
  Matrix G = Matrix::Identity(d, d);
  Matrix Ak = A;
  for (int j = 0; j <= kMaxDoublings; ++j) {
    if (lyapunov_residual(A, G) <= tol) return G;
    G += Ak * G * Ak.transpose();
    Ak = (Ak * Ak).eval();
  }
  throw NumericalError("gramian_infinite: Smith iteration did not reach the residual tolerance");
}

}  // namespace rankadapt
