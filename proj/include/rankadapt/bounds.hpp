#pragma once

// Closed-form error bounds and sample-complexity functionals.
//
// Evaluators whose constants are explicit (18, 864, 6 sqrt(2), 32/log 2,
// 640/log 2) carry them exactly. Rates that only hold up to an unspecified
// universal constant (theorem_full_lb) are returned without it; see
// BoundValue::is_rate.

#include <cstdint>
#include <optional>
#include <vector>

#include "rankadapt/problem_gen.hpp"
#include "rankadapt/spectral.hpp"

namespace rankadapt {

struct BoundInputs {
  std::uint64_t n = 1;
  double delta = 0.05;
  double sigma = 0;
  Index d_x = 0;
  Index d_y = 0;
  Index r = 0;
  /// s_i(A), nonincreasing, nonnegative.
  Vector target_spectrum;
  /// Eigenvalues of Sigma, Gamma_inf(A) or Sigma_hat, nonincreasing, positive.
  Vector cov_spectrum;

  /// Throws DomainError on unsorted spectra, delta outside (0,1), r out of range.
  void validate() const;
  double log_inv_delta() const;
};

struct BoundValue {
  double value = 0;
  std::optional<Index> minimizer_k;
  bool is_rate = false;  // true when a suppressed universal constant is dropped
};

/// Range of effective ranks a minimization runs over: {1..r}, or {0..r} with
/// the pure-tail option.
enum class RankRange { one_to_r, zero_to_r };

/// sum_{i > k} s_i^2.
double spectral_tail(const Vector& spectrum, Index k);

/// f(tau) = ((4 + 2 tau) sqrt(2 / tau) + sqrt(2 + tau))^2.
double chatterjee_factor(double tau);

/// f(tau) ||Z||_2 ||A||_*.
double chatterjee_bound(double tau, double z_op_norm, double a_nuclear_norm);

/// 18 (k(tau) ||Z||_2^2 + sum_{i > k(tau)} s_i^2(A)) with
/// k(tau) = max{i : s_i(Abar) >= (1 + tau) ||Z||_2}. For ||Z||_2 = 0, k(tau)
/// is the numerical rank of Abar.
BoundValue adaptive_denoise_bound(const Vector& abar_spectrum, const Vector& a_spectrum,
                                  double z_op_norm, double tau);

/// 18 min_k (4 k xi^2 + sum_{i > k} s_i^2(A)); ties go to the smallest k.
BoundValue theorem1_bound(const Vector& a_spectrum, double xi, Index r,
                          RankRange range = RankRange::one_to_r);

/// sigma^2 max((k d_x + log(1/delta)) / (n lambda_bar_k), (k d_y + log(1/delta)) / (n lambda_under_k)).
double err_reg(Index k, const BoundInputs& in);

/// sigma^2 (k d_x + log(1/delta)) / (n lambda_under_k).
double err_lti(Index k, const BoundInputs& in);

/// min_k ErrReg(k) + tail(k), minimizer = k*.
BoundValue gamma_delta(const BoundInputs& in, RankRange range = RankRange::one_to_r);

/// min_k ErrLti(k) + tail(k), minimizer = k*.
BoundValue beta_delta(const BoundInputs& in, RankRange range = RankRange::one_to_r);

/// C epsilon^2 with C = 32/log 2 (regression) or 640/log 2 (sysid).
double sample_complexity_threshold(double epsilon, Setting setting);

/// Smallest n with gamma (regression) or beta (sysid) <= threshold, ignoring
/// in.n. Throws InfeasibleError when the rank-r tail alone exceeds the
/// threshold.
std::uint64_t sample_complexity_for_threshold(const BoundInputs& in, double threshold,
                                              Setting setting);

/// sample_complexity_for_threshold at C epsilon^2.
std::uint64_t sample_complexity_lb(const BoundInputs& in, double epsilon, Setting setting);

/// Rank-constrained sample-complexity rate (sigma^2/epsilon^2) times
/// max((r d_x + L)/lambda_bar_r, (r d_y + L)/lambda_under_r) for regression or
/// (r d_x + L)/lambda_under_r for sysid, L = log(1/delta). A rate: is_rate is set.
BoundValue theorem_full_lb(const BoundInputs& in, double epsilon, Setting setting);

/// 6 sqrt(2) r sigma^2 (max(d_x, d_y) + log(1/delta)) / (n lambda^H_r).
double rlse_upper(const BoundInputs& in);

/// 864 min_k (k sigma^2 (max(d_x, d_y) + log(1/delta)) / (n lambda_min) + tail(k)).
BoundValue tlse_upper(const BoundInputs& in, RankRange range = RankRange::one_to_r);

/// k sigma^2 (sqrt(d_x) + sqrt(d_y) + sqrt(log(1/delta)))^2 / (n lambda^H_k):
/// high-probability bound on ||Pi_k(Z)||_F^2 for the regression LSE error.
double pi_k_noise_bound(Index k, const BoundInputs& in);

/// ||Pi_k(Abar) - A||_F <= 2 sqrt(2) ||Pi_k(Z)||_F + 3 ||A - Pi_k(A)||_F + 1e-9,
/// with Z = Abar - A.
bool lemma1_check(const Matrix& abar, const Matrix& a, Index k);

/// Covariance deviation radius 2 eps + eps^2 with
/// eps = sqrt(d_x / n) + sqrt(2 log(1/delta) / n).
double covariance_deviation_radius(Index d_x, std::uint64_t n, double delta);

/// Constants of the system-identification burn-in conditions. Their values
/// are not pinned down anywhere; all default to 1.
struct BurnInConstants {
  double c0 = 1;
  double c1 = 1;
  double c2 = 1;
  double c3 = 1;
  double c4 = 1;
};

/// max(c0 sigma^4, 1) ||Gamma_inf||^3 / lambda_min(Gamma_inf) (log(1/delta) + d_x):
/// trajectory length above which the sysid threshold is meant to hold.
double sysid_burn_in(const Matrix& gramian_inf, double sigma, double delta, Index d_x,
                     const BurnInConstants& c = {});

/// c1 sigma^4 ||Gamma_inf||^3 / lambda_min(Sigma) (log(1/delta) + c2 d_x): trajectory
/// length for the two-sided eigenvalue sandwich of the LTI empirical covariance.
double lti_covariance_burn_in(const Matrix& gramian_inf, const Matrix& sigma_avg, double sigma,
                              double delta, Index d_x, const BurnInConstants& c = {});

/// 2 log(2) ||Gamma_inf||_2: sample size above which the averaged finite
/// Gramian dominates Gamma_inf / 4.
double gramian_average_min_samples(const Matrix& gramian_inf);

}  // namespace rankadapt
