#pragma once

// Seeded synthetic estimation problems: spectral-profile targets,
// covariate-aligned targets, stable symmetric dynamics, Gaussian regression
// samples and LTI trajectories.
//
// Every generator is a pure function of its arguments. Randomness comes from
// rankadapt::Rng streams keyed by the caller's seed, so generating trials in
// parallel yields the same instances as generating them serially.

#include <cstdint>
#include <optional>
#include <string_view>

#include "rankadapt/spectral.hpp"

namespace rankadapt {

enum class Setting { regression, sysid };

std::string_view to_string(Setting s);

/// A generated estimation task. Matrices follow Y = X A^T + E, with A of
/// shape d_y x d_x, X of shape n x d_x and Y of shape n x d_y.
struct ProblemInstance {
  Matrix A;
  Matrix X;
  Matrix Y;
  double sigma = 0;
  Setting setting = Setting::regression;
  std::uint64_t seed = 0;
  /// Population covariance of the covariate rows when known (regression).
  std::optional<Matrix> covariance;

  Index n() const { return X.rows(); }
  Index d_x() const { return X.cols(); }
  Index d_y() const { return Y.cols(); }
};

/// Which power law a profile follows: s_j = 1/j^b or s_j = 1/(j+1)^b.
enum class SpectrumOffset { j, j_plus_1 };

struct SpectrumProfile {
  Index d = 0;
  Index r = 0;
  double b = 0;
  SpectrumOffset offset = SpectrumOffset::j;

  /// Length-d vector: the power law for j <= r, zero after.
  Vector values() const;
  void validate() const;
};

/// d x d target of rank r: singular vectors of a Uniform[0,1] matrix with the
/// singular values replaced by the profile.
Matrix make_target(const SpectrumProfile& profile, std::uint64_t seed);

/// A = U S P F^T, where F holds the right singular vectors of X, U comes from
/// the SVD of a Uniform[0,1] matrix and P circularly shifts the rows of F^T
/// by `shift` (row i of P F^T is row (i + shift) mod d of F^T).
Matrix make_aligned_target(const Matrix& X, const SpectrumProfile& profile, Index shift,
                           std::uint64_t seed);

/// Symmetric PSD target U S U^T with s_j = 1/(j+1)^b for j <= r.
/// Requires offset == j_plus_1. The spectral radius is 2^-b, so b = 0 gives a
/// marginally unstable matrix.
Matrix make_stable_symmetric(const SpectrumProfile& profile, std::uint64_t seed);

/// n rows drawn i.i.d. from N(0, Sigma) through the Cholesky factor of Sigma.
Matrix sample_design(const Matrix& Sigma, Index n, std::uint64_t seed);

/// Regression observations Y = X A^T + E for a given design, E ~ N(0, sigma^2).
ProblemInstance observe_regression(const Matrix& A, const Matrix& X, double sigma,
                                   std::uint64_t seed);

/// Fresh design and noise: rows of X ~ N(0, Sigma), Y = X A^T + E.
ProblemInstance sample_regression(const Matrix& A, const Matrix& Sigma, Index n, double sigma,
                                  std::uint64_t seed);

/// Trajectory x_1 = 0, x_{t+1} = A x_t + eta_t for t = 1..n, eta_t ~ N(0, sigma^2 I).
/// X holds x_1..x_n and Y holds x_2..x_{n+1}.
ProblemInstance simulate_lti(const Matrix& A, Index n, double sigma, std::uint64_t seed);

/// (1/n) sum_i x_i x_i^T over the rows of X.
Matrix empirical_covariance(const Matrix& X);

/// Expected empirical covariance of simulate_lti's X:
/// (sigma^2 / n) sum_{i=0}^{n-2} Gamma_i(A) (the first row is the zero state).
Matrix lti_expected_covariance(const Matrix& A, Index n, double sigma);

}  // namespace rankadapt
