#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include "rankadapt/rng.hpp"
#include "rankadapt/spectral.hpp"

namespace rankadapt::testing {

inline Matrix diag(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

inline Vector vec(std::initializer_list<double> v) {
  Vector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d;
}

inline Matrix random_orthonormal(Rng& rng, Index d, Index k) {
  Eigen::HouseholderQR<Matrix> qr(rng.gaussian_matrix(d, k));
  return qr.householderQ() * Matrix::Identity(d, k);
}

/// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
inline Matrix random_spd(Rng& rng, Index d, double lo, double hi) {
  const Matrix Q = random_orthonormal(rng, d, d);
  Vector ev(d);
  for (Index i = 0; i < d; ++i) ev(i) = rng.uniform(lo, hi);
  return Q * ev.asDiagonal() * Q.transpose();
}

/// Random square matrix scaled to spectral radius rho.
inline Matrix random_stable(Rng& rng, Index d, double rho) {
  Matrix A = rng.gaussian_matrix(d, d);
  Eigen::EigenSolver<Matrix> es(A, false);
  const double r = es.eigenvalues().cwiseAbs().maxCoeff();
  return A * (rho / r);
}

inline ::testing::AssertionResult matrices_near(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return ::testing::AssertionFailure() << "shape " << a.rows() << "x" << a.cols() << " vs "
                                         << b.rows() << "x" << b.cols();
  const double err = (a - b).norm();
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "||a - b||_F = " << err << " > " << tol;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rankadapt_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace rankadapt::testing
