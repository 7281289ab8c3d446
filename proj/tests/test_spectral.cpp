#include <gtest/gtest.h>

#include <limits>

#include "rankadapt/bounds.hpp"
#include "rankadapt/errors.hpp"
#include "rankadapt/spectral.hpp"
#include "test_util.hpp"

using namespace rankadapt;
using rankadapt::testing::diag;
using rankadapt::testing::matrices_near;
using rankadapt::testing::vec;

TEST(Svd, IdentityHasUnitSingularValues) {
  const SvdFactors f = svd(Matrix::Identity(3, 3));
  EXPECT_TRUE(matrices_near(f.s, vec({1, 1, 1}), 1e-15));
}

TEST(Svd, DiagonalSpectrumIsSorted) {
  EXPECT_TRUE(matrices_near(svd(diag({1, 3, 2})).s, vec({3, 2, 1}), 1e-14));
}

TEST(Svd, FactorsSatisfyInvariants) {
  Rng rng(11);
  for (auto [r, c] : {std::pair{4, 3}, {3, 4}, {7, 7}, {20, 5}}) {
    const Matrix M = rng.gaussian_matrix(r, c);
    const SvdFactors f = svd(M);
    const Index m = std::min(r, c);
    ASSERT_EQ(f.s.size(), m);
    for (Index i = 1; i < m; ++i) EXPECT_LE(f.s(i), f.s(i - 1));
    EXPECT_GE(f.s.minCoeff(), 0.0);
    EXPECT_LE((f.U.transpose() * f.U - Matrix::Identity(m, m)).norm(), 1e-10);
    EXPECT_LE((f.V.transpose() * f.V - Matrix::Identity(m, m)).norm(), 1e-10);
    EXPECT_LE((f.reconstruct() - M).norm(), 1e-10);
  }
}

TEST(Svd, RejectsNonFiniteInput) {
  Matrix M = Matrix::Identity(2, 2);
  M(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(svd(M), DomainError);
}

TEST(TruncateRank, KeepsLeadingTriplets) {
  EXPECT_TRUE(matrices_near(truncate_rank(diag({3, 2, 1}), 2), diag({3, 2, 0}), 1e-14));
}

TEST(TruncateRank, ZeroRankGivesZeroMatrix) {
  Rng rng(3);
  const Matrix M = rng.gaussian_matrix(4, 6);
  const Matrix T = truncate_rank(M, 0);
  EXPECT_EQ(T.rows(), 4);
  EXPECT_EQ(T.cols(), 6);
  EXPECT_EQ(T.norm(), 0.0);
}

TEST(TruncateRank, FullRankReturnsInput) {
  Rng rng(4);
  const Matrix M = rng.gaussian_matrix(5, 5);
  EXPECT_TRUE(matrices_near(truncate_rank(M, 5), M, 1e-10));
  EXPECT_TRUE(matrices_near(truncate_rank(M, 9), M, 1e-10));
}

TEST(HardThreshold, StrictComparison) {
  EXPECT_TRUE(matrices_near(hard_threshold(diag({3, 2, 1}), 1.5), diag({3, 2, 0}), 1e-14));
  EXPECT_EQ(hard_threshold(diag({3, 2, 1}), 3.0).norm(), 0.0);
  EXPECT_EQ(count_above(vec({3, 2, 1}), 2.0), 1);
}

TEST(HardThreshold, ZeroThresholdKeepsEverything) {
  Rng rng(5);
  const Matrix M = rng.gaussian_matrix(6, 4);
  EXPECT_TRUE(matrices_near(hard_threshold(M, 0.0), M, 1e-10));
}

TEST(HardThreshold, RejectsNegativeThreshold) {
  EXPECT_THROW(hard_threshold(diag({1, 1}), -1.0), DomainError);
}

TEST(HardThreshold, EqualsTruncationAtCount) {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const Matrix M = rng.gaussian_matrix(6, 5);
    const Vector s = singular_values(M);
    const double xi = rng.uniform(0, s(0) * 1.2);
    EXPECT_EQ((hard_threshold(M, xi) - truncate_rank(M, count_above(s, xi))).norm(), 0.0);
  }
}

TEST(NumericalRank, CountsRelativeToLeadingValue) {
  EXPECT_EQ(numerical_rank(vec({3, 2, 1})), 3);
  EXPECT_EQ(numerical_rank(vec({1, 1e-13})), 1);
  EXPECT_EQ(numerical_rank(vec({0, 0})), 0);
}

TEST(SpectralSummary, DiagonalExample) {
  const SpectralSummary s = spectral_summary(diag({4, 2, 1}), 2);
  EXPECT_DOUBLE_EQ(s.lambda_bar_k, 3.0);
  EXPECT_DOUBLE_EQ(s.lambda_under_k, 1.5);
  EXPECT_DOUBLE_EQ(s.lambda_harmonic_k, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.kappa, 4.0);
  EXPECT_FALSE(s.singular);
}

TEST(SpectralSummary, IdentityIsFlat) {
  for (Index k = 1; k <= 5; ++k) {
    const SpectralSummary s = spectral_summary(Matrix(Matrix::Identity(5, 5)), k);
    EXPECT_DOUBLE_EQ(s.lambda_bar_k, 1.0);
    EXPECT_DOUBLE_EQ(s.lambda_under_k, 1.0);
    EXPECT_DOUBLE_EQ(s.lambda_harmonic_k, 1.0);
    EXPECT_DOUBLE_EQ(s.kappa, 1.0);
  }
}

TEST(SpectralSummary, SingleEigenvalueBlock) {
  const SpectralSummary s = spectral_summary(diag({4, 1}), 1);
  EXPECT_DOUBLE_EQ(s.lambda_bar_k, 4.0);
  EXPECT_DOUBLE_EQ(s.lambda_under_k, 1.0);
  EXPECT_DOUBLE_EQ(s.lambda_harmonic_k, 1.0);
}

TEST(SpectralSummary, SingularInputIsFlagged) {
  const SpectralSummary s = spectral_summary(diag({2, 0}), 1);
  EXPECT_TRUE(s.singular);
  EXPECT_TRUE(std::isinf(s.kappa));
  EXPECT_EQ(s.lambda_harmonic_k, 0.0);
}

TEST(SpectralSummary, MeanOrdering) {
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const Matrix S = rankadapt::testing::random_spd(rng, 6, 0.1, 5.0);
    for (Index k = 1; k <= 6; ++k) {
      const SpectralSummary s = spectral_summary(S, k);
      EXPECT_LE(s.lambda_harmonic_k, s.lambda_under_k * (1 + 1e-12));
      EXPECT_LE(s.lambda_under_k, s.lambda_bar_k * (1 + 1e-12));
      EXPECT_GE(s.kappa, 1.0);
    }
  }
}

TEST(SpectralSummary, RejectsAsymmetricInput) {
  Matrix S = diag({2, 1});
  S(0, 1) = 1e-6;
  EXPECT_THROW(spectral_summary(S, 1), DomainError);
  S(0, 1) = 1e-13;
  EXPECT_NO_THROW(spectral_summary(S, 1));
}

TEST(SpectralSummary, RejectsBadRank) {
  EXPECT_THROW(spectral_summary(diag({2, 1}), 0), DomainError);
  EXPECT_THROW(spectral_summary(diag({2, 1}), 3), DomainError);
}

TEST(GramianFinite, ZeroDynamicsGiveIdentity) {
  for (Index p : {0, 1, 5})
    EXPECT_TRUE(matrices_near(gramian_finite(Matrix::Zero(3, 3), p), Matrix::Identity(3, 3), 0));
}

TEST(GramianFinite, ScaledIdentity) {
  EXPECT_TRUE(matrices_near(gramian_finite(0.5 * Matrix::Identity(2, 2), 1),
                            1.25 * Matrix::Identity(2, 2), 1e-15));
}

TEST(GramianFinite, MatchesDirectSum) {
  Rng rng(8);
  const Matrix A = rng.gaussian_matrix(4, 4) * 0.4;
  Matrix expected = Matrix::Zero(4, 4);
  Matrix P = Matrix::Identity(4, 4);
  for (int k = 0; k <= 3; ++k) {
    expected += P * P.transpose();
    P = A * P;
  }
  EXPECT_TRUE(matrices_near(gramian_finite(A, 3), expected, 1e-12));
}

TEST(GramianInfinite, ClosedForms) {
  EXPECT_TRUE(matrices_near(gramian_infinite(Matrix::Zero(3, 3)), Matrix::Identity(3, 3), 1e-14));
  EXPECT_TRUE(matrices_near(gramian_infinite(0.5 * Matrix::Identity(2, 2)),
                            (4.0 / 3.0) * Matrix::Identity(2, 2), 1e-12));
}

TEST(GramianInfinite, RandomStableResidual) {
  Rng rng(9);
  const Matrix A = rankadapt::testing::random_stable(rng, 6, 0.8);
  const Matrix G = gramian_infinite(A);
  EXPECT_LE(lyapunov_residual(A, G), 1e-10);
}

TEST(GramianInfinite, RejectsUnstable) {
  EXPECT_THROW(gramian_infinite(Matrix::Identity(2, 2)), NumericalError);
  EXPECT_THROW(gramian_infinite(1.5 * Matrix::Identity(2, 2)), NumericalError);
  EXPECT_THROW(gramian_infinite(Matrix::Zero(2, 3)), DomainError);
}

// Properties

TEST(SpectralProperty, EckartYoung) {
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const Index d = 2 + t % 7;
    const Index k = 1 + t % (d - 1);
    const Matrix M = rng.gaussian_matrix(d, d);
    const Matrix B = rng.gaussian_matrix(d, k) * rng.gaussian_matrix(k, d);
    EXPECT_LE((M - truncate_rank(M, k)).norm(), (M - B).norm() + 1e-9);
  }
}

TEST(SpectralProperty, WeylPerturbation) {
  Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    const Matrix M = rng.gaussian_matrix(6, 5);
    const Matrix Z = rng.gaussian_matrix(6, 5) * rng.uniform(0, 2);
    const Vector a = singular_values(M + Z);
    const Vector b = singular_values(M);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), operator_norm(Z) + 1e-9);
  }
}

TEST(SpectralProperty, ExtremalPartialTrace) {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    const Index d = 8;
    const Index k = 1 + t % d;
    const Matrix S = rankadapt::testing::random_spd(rng, d, 0.01, 10);
    const Matrix Q = rankadapt::testing::random_orthonormal(rng, d, k);
    const Vector ev = symmetric_eigenvalues(S);
    const double tr = (Q.transpose() * S * Q).trace();
    EXPECT_GE(tr, ev.tail(k).sum() - 1e-9);
    EXPECT_LE(tr, ev.head(k).sum() + 1e-9);
  }
}

TEST(SpectralProperty, GramianSandwich) {
  Rng rng(24);
  for (int t = 0; t < 30; ++t) {
    const Index d = 2 + t % 6;
    const Matrix A = rankadapt::testing::random_stable(rng, d, rng.uniform(0.1, 0.9));
    const Matrix Ginf = gramian_infinite(A);
    const Index n = std::max<Index>(1, Index(std::ceil(gramian_average_min_samples(Ginf))));
    Matrix avg = Matrix::Zero(d, d);
    for (Index i = 0; i < n; ++i) avg += gramian_finite(A, i);
    avg /= double(n);
    EXPECT_GE(symmetric_eigenvalues(avg - 0.25 * Ginf).minCoeff(), -1e-9);
    EXPECT_GE(symmetric_eigenvalues(Ginf - avg).minCoeff(), -1e-9);
  }
}
