#include "rankadapt/bounds.hpp"

#include "rankadapt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rankadapt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool nonincreasing(const Vector& v) {
  for (Index i = 1; i < v.size(); ++i)
    if (v(i) > v(i - 1)) return false;
  return true;
}

void require_spectrum(const Vector& s, const char* what) {
  if (!s.allFinite() || (s.size() && s.minCoeff() < 0) || !nonincreasing(s))
    throw DomainError(std::string(what) + ": spectrum must be finite, nonnegative and nonincreasing");
}

// Scans k over the range and keeps the first minimizer.
template <class Term>
BoundValue minimize_over_rank(Index r, RankRange range, Term&& term) {
  BoundValue best{kInf, std::nullopt, false};
  for (Index k = range == RankRange::zero_to_r ? 0 : 1; k <= r; ++k) {
    const double v = term(k);
    if (v < best.value) best = {v, k, false};
  }
  if (!best.minimizer_k) throw DomainError("rank minimization over an empty range");
  return best;
}

// Mean of the k largest / smallest entries of a nonincreasing vector.
double mean_top(const Vector& ev, Index k) { return ev.head(k).mean(); }
double mean_bottom(const Vector& ev, Index k) { return ev.tail(k).mean(); }

double harmonic_bottom(const Vector& ev, Index k) {
  const Vector tail = ev.tail(k);
  if (tail.minCoeff() <= 0) return 0;
  return static_cast<double>(k) / tail.cwiseInverse().sum();
}

double safe_ratio(double num, double den) {
  if (num == 0) return 0;
  return den > 0 ? num / den : kInf;
}

}  // namespace

void BoundInputs::validate() const {
  if (n < 1) throw DomainError("bound inputs: n must be >= 1");
  if (!(delta > 0 && delta < 1)) throw DomainError("bound inputs: delta must lie in (0, 1)");
  if (!(sigma >= 0)) throw DomainError("bound inputs: sigma must be >= 0");
  if (d_x < 1 || d_y < 1) throw DomainError("bound inputs: dimensions must be >= 1");
  if (r < 0 || r > std::min(d_x, d_y)) throw DomainError("bound inputs: need 0 <= r <= min(d_x, d_y)");
  require_spectrum(target_spectrum, "bound inputs (target)");
  require_spectrum(cov_spectrum, "bound inputs (covariance)");
}

double BoundInputs::log_inv_delta() const { return std::log(1.0 / delta); }

double spectral_tail(const Vector& spectrum, Index k) {
  k = std::max<Index>(k, 0);
  if (k >= spectrum.size()) return 0;
  return spectrum.tail(spectrum.size() - k).squaredNorm();
}

double chatterjee_factor(double tau) {
  if (!(tau > 0)) throw DomainError("chatterjee_factor: tau must be > 0");
  const double v = (4.0 + 2.0 * tau) * std::sqrt(2.0 / tau) + std::sqrt(2.0 + tau);
  return v * v;
}

double chatterjee_bound(double tau, double z_op_norm, double a_nuclear_norm) {
  return chatterjee_factor(tau) * z_op_norm * a_nuclear_norm;
}

BoundValue adaptive_denoise_bound(const Vector& abar_spectrum, const Vector& a_spectrum,
                                  double z_op_norm, double tau) {
  require_spectrum(abar_spectrum, "adaptive_denoise_bound");
  require_spectrum(a_spectrum, "adaptive_denoise_bound");
  if (!(tau >= 0)) throw DomainError("adaptive_denoise_bound: tau must be >= 0");
  Index k = 0;
  if (z_op_norm == 0) {
    k = numerical_rank(abar_spectrum);
  } else {
    const double level = (1.0 + tau) * z_op_norm;
    while (k < abar_spectrum.size() && abar_spectrum(k) >= level) ++k;
  }
  return {18.0 * (static_cast<double>(k) * z_op_norm * z_op_norm + spectral_tail(a_spectrum, k)), k,
          false};
}

BoundValue theorem1_bound(const Vector& a_spectrum, double xi, Index r, RankRange range) {
  require_spectrum(a_spectrum, "theorem1_bound");
  if (!(xi >= 0)) throw DomainError("theorem1_bound: xi must be >= 0");
  if (r < 0) throw DomainError("theorem1_bound: r must be >= 0");
  return minimize_over_rank(r, range, [&](Index k) {
    return 18.0 * (4.0 * static_cast<double>(k) * xi * xi + spectral_tail(a_spectrum, k));
  });
}

double err_reg(Index k, const BoundInputs& in) {
  in.validate();
  if (k < 1 || k > in.cov_spectrum.size()) throw DomainError("err_reg: k out of range");
  const double L = in.log_inv_delta();
  const double nd = static_cast<double>(in.n);
  const double kd = static_cast<double>(k);
  const double s2 = in.sigma * in.sigma;
  return std::max(safe_ratio(s2 * (kd * in.d_x + L), nd * mean_top(in.cov_spectrum, k)),
                  safe_ratio(s2 * (kd * in.d_y + L), nd * mean_bottom(in.cov_spectrum, k)));
}

double err_lti(Index k, const BoundInputs& in) {
  in.validate();
  if (k < 1 || k > in.cov_spectrum.size()) throw DomainError("err_lti: k out of range");
  const double s2 = in.sigma * in.sigma;
  return safe_ratio(s2 * (static_cast<double>(k) * in.d_x + in.log_inv_delta()),
                    static_cast<double>(in.n) * mean_bottom(in.cov_spectrum, k));
}

BoundValue gamma_delta(const BoundInputs& in, RankRange range) {
  in.validate();
  return minimize_over_rank(in.r, range, [&](Index k) {
    return (k == 0 ? 0.0 : err_reg(k, in)) + spectral_tail(in.target_spectrum, k);
  });
}

BoundValue beta_delta(const BoundInputs& in, RankRange range) {
  in.validate();
  return minimize_over_rank(in.r, range, [&](Index k) {
    return (k == 0 ? 0.0 : err_lti(k, in)) + spectral_tail(in.target_spectrum, k);
  });
}

double sample_complexity_threshold(double epsilon, Setting setting) {
  if (!(epsilon > 0)) throw DomainError("sample complexity: epsilon must be > 0");
  const double c = setting == Setting::regression ? 32.0 : 640.0;
  return c / std::numbers::ln2 * epsilon * epsilon;
}

std::uint64_t sample_complexity_for_threshold(const BoundInputs& in, double threshold,
                                              Setting setting) {
  in.validate();
  if (!(threshold > 0)) throw DomainError("sample complexity: threshold must be > 0");
  // gamma(n) decreases to tail(r) as n grows; with sigma > 0 it never reaches it.
  const double floor_tail = spectral_tail(in.target_spectrum, in.r);
  if (floor_tail > threshold || (in.sigma > 0 && floor_tail >= threshold)) {
    throw InfeasibleError("sample complexity: target below the rank-r approximation tail (" +
                          std::to_string(floor_tail) + ")");
  }

  BoundInputs probe = in;
  auto value_at = [&](std::uint64_t n) {
    probe.n = n;
    return setting == Setting::regression ? gamma_delta(probe).value : beta_delta(probe).value;
  };

  std::uint64_t hi = 1;
  while (value_at(hi) > threshold) {
    if (hi >= (std::uint64_t{1} << 62))
      throw InfeasibleError("sample complexity: no n below 2^62 reaches the threshold");
    hi <<= 1;
  }
  if (hi == 1) return 1;
  std::uint64_t lo = hi / 2;  // value_at(lo) > threshold
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (value_at(mid) <= threshold ? hi : lo) = mid;
  }
  return hi;
}

std::uint64_t sample_complexity_lb(const BoundInputs& in, double epsilon, Setting setting) {
  return sample_complexity_for_threshold(in, sample_complexity_threshold(epsilon, setting), setting);
}

BoundValue theorem_full_lb(const BoundInputs& in, double epsilon, Setting setting) {
  in.validate();
  if (!(epsilon > 0)) throw DomainError("theorem_full_lb: epsilon must be > 0");
  if (in.r < 1) throw DomainError("theorem_full_lb: r must be >= 1");
  const double L = in.log_inv_delta();
  const double rd = static_cast<double>(in.r);
  const double scale = in.sigma * in.sigma / (epsilon * epsilon);
  double ratio = safe_ratio(rd * in.d_x + L, mean_bottom(in.cov_spectrum, in.r));
  if (setting == Setting::regression) {
    ratio = std::max(safe_ratio(rd * in.d_x + L, mean_top(in.cov_spectrum, in.r)),
                     safe_ratio(rd * in.d_y + L, mean_bottom(in.cov_spectrum, in.r)));
  }
  return {scale == 0 ? 0.0 : scale * ratio, std::nullopt, true};
}

double rlse_upper(const BoundInputs& in) {
  in.validate();
  const double dbar = static_cast<double>(std::max(in.d_x, in.d_y));
  const double num = 6.0 * std::numbers::sqrt2 * static_cast<double>(in.r) * in.sigma * in.sigma *
                     (dbar + in.log_inv_delta());
  return safe_ratio(num, static_cast<double>(in.n) * harmonic_bottom(in.cov_spectrum, in.r));
}

BoundValue tlse_upper(const BoundInputs& in, RankRange range) {
  in.validate();
  const double dbar = static_cast<double>(std::max(in.d_x, in.d_y));
  const double lmin = in.cov_spectrum(in.cov_spectrum.size() - 1);
  const double per_rank = safe_ratio(in.sigma * in.sigma * (dbar + in.log_inv_delta()),
                                     static_cast<double>(in.n) * lmin);
  BoundValue v = minimize_over_rank(in.r, range, [&](Index k) {
    const double est = k == 0 ? 0.0 : static_cast<double>(k) * per_rank;
    return est + spectral_tail(in.target_spectrum, k);
  });
  v.value *= 864.0;
  return v;
}

double pi_k_noise_bound(Index k, const BoundInputs& in) {
  in.validate();
  if (k < 1 || k > in.cov_spectrum.size()) throw DomainError("pi_k_noise_bound: k out of range");
  const double w = std::sqrt(static_cast<double>(in.d_x)) + std::sqrt(static_cast<double>(in.d_y)) +
                   std::sqrt(in.log_inv_delta());
  return safe_ratio(static_cast<double>(k) * in.sigma * in.sigma * w * w,
                    static_cast<double>(in.n) * harmonic_bottom(in.cov_spectrum, k));
}

bool lemma1_check(const Matrix& abar, const Matrix& a, Index k) {
  if (abar.rows() != a.rows() || abar.cols() != a.cols())
    throw DomainError("lemma1_check: shape mismatch");
  if (k < 0) throw DomainError("lemma1_check: k must be >= 0");
  const Matrix z = abar - a;
  const double lhs = (truncate_rank(abar, k) - a).norm();
  const double rhs = 2.0 * std::numbers::sqrt2 * truncate_rank(z, k).norm() +
                     3.0 * (a - truncate_rank(a, k)).norm();
  return lhs <= rhs + 1e-9;
}

double covariance_deviation_radius(Index d_x, std::uint64_t n, double delta) {
  if (n < 1) throw DomainError("covariance_deviation_radius: n must be >= 1");
  if (!(delta > 0 && delta < 1)) throw DomainError("covariance_deviation_radius: delta must lie in (0, 1)");
  const double nd = static_cast<double>(n);
  const double eps = std::sqrt(static_cast<double>(d_x) / nd) + std::sqrt(2.0 * std::log(1.0 / delta) / nd);
  return 2.0 * eps + eps * eps;
}

double sysid_burn_in(const Matrix& gramian_inf, double sigma, double delta, Index d_x,
                     const BurnInConstants& c) {
  const Vector ev = symmetric_eigenvalues(gramian_inf);
  const double s4 = std::pow(sigma, 4);
  return std::max(c.c0 * s4, 1.0) * std::pow(ev(0), 3) / ev(ev.size() - 1) *
         (std::log(1.0 / delta) + static_cast<double>(d_x));
}

double lti_covariance_burn_in(const Matrix& gramian_inf, const Matrix& sigma_avg, double sigma,
                              double delta, Index d_x, const BurnInConstants& c) {
  const double g = symmetric_eigenvalues(gramian_inf)(0);
  const Vector ev = symmetric_eigenvalues(sigma_avg);
  return c.c1 * std::pow(sigma, 4) * std::pow(g, 3) / ev(ev.size() - 1) *
         (std::log(1.0 / delta) + c.c2 * static_cast<double>(d_x));
}

double gramian_average_min_samples(const Matrix& gramian_inf) {
  return 2.0 * std::numbers::ln2 * symmetric_eigenvalues(gramian_inf)(0);
}

}  // namespace rankadapt
