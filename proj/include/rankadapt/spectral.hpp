#pragma once

// Dense spectral kernel: thin SVD, rank truncation, singular-value hard
// thresholding, eigenvalue summaries and controllability Gramians.
//
// All functions are pure; they may be called concurrently.

#include <Eigen/Dense>

#include <cstddef>
#include <limits>

namespace rankadapt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative cutoff under which a singular value counts as zero for rank
/// counting: s_i <= kRankTol * s_1.
inline constexpr double kRankTol = 1e-12;

/// Thin SVD M = U diag(s) V^T with s nonincreasing.
struct SvdFactors {
  Matrix U;  // rows x min(rows, cols), orthonormal columns
  Vector s;  // min(rows, cols), nonincreasing, >= 0
  Matrix V;  // cols x min(rows, cols), orthonormal columns

  /// Sum of the leading `k` singular triplets (all of them when k >= size).
  Matrix reconstruct(Index k) const;
  Matrix reconstruct() const { return reconstruct(s.size()); }
};

/// Throws DomainError if any entry is NaN or infinite.
void require_finite(const Matrix& M, const char* what);

/// Throws DomainError if M is not square.
void require_square(const Matrix& M, const char* what);

/// Thin SVD. Throws NumericalError when the factorization does not converge.
SvdFactors svd(const Matrix& M);

/// Singular values only, nonincreasing.
Vector singular_values(const Matrix& M);

/// Best rank-k approximation Pi_k(M). k = 0 gives the zero matrix.
Matrix truncate_rank(const Matrix& M, Index k);

/// Keeps the singular triplets with s_i > xi (strict).
Matrix hard_threshold(const Matrix& M, double xi);

/// Number of singular values strictly above xi.
Index count_above(const Vector& s, double xi);

/// #{i : s_i > rel_tol * s_1}; zero for an all-zero spectrum.
Index numerical_rank(const Vector& s, double rel_tol = kRankTol);

double operator_norm(const Matrix& M);
double nuclear_norm(const Matrix& M);

/// Eigenvalues of a symmetric matrix in nonincreasing order.
///
/// Inputs whose asymmetry max|S - S^T| exceeds 1e-10 * max(1, max|S|) are
/// rejected; smaller asymmetry is removed by symmetrizing (S + S^T) / 2.
Vector symmetric_eigenvalues(const Matrix& S);

/// Mean statistics of a PSD spectrum at level k.
struct SpectralSummary {
  double lambda_bar_k = 0;       // mean of the k largest eigenvalues
  double lambda_under_k = 0;     // mean of the k smallest eigenvalues
  double lambda_harmonic_k = 0;  // harmonic mean of the k smallest
  double kappa = 1;              // lambda_1 / lambda_d
  bool singular = false;         // lambda_d == 0: harmonic mean 0, kappa +inf
};

/// Summary of a nonincreasing eigenvalue vector.
SpectralSummary spectral_summary(const Vector& eigenvalues_desc, Index k);

/// Summary of a symmetric PSD matrix.
SpectralSummary spectral_summary(const Matrix& S, Index k);

/// max |eigenvalue| of a square matrix.
double spectral_radius(const Matrix& A);

/// Gamma_p(A) = sum_{k=0}^{p} A^k (A^k)^T.
Matrix gramian_finite(const Matrix& A, Index p);

/// Gamma_inf(A), the solution of G = A G A^T + I, by Smith doubling.
///
/// Requires rho(A) < 1 - 1e-8 (NumericalError otherwise). Iterates until the
/// Lyapunov residual ||A G A^T + I - G||_F <= tol, throwing NumericalError if
/// the doubling cap is reached first.
Matrix gramian_infinite(const Matrix& A, double tol = 1e-12);

/// ||A G A^T + I - G||_F.
double lyapunov_residual(const Matrix& A, const Matrix& G);

}  // namespace rankadapt
