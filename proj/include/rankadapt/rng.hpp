#pragma once

#include <cstdint>
#include <random>

#include "rankadapt/spectral.hpp"

namespace rankadapt {

/// Named sub-streams of one trial. A trial's target, design and noise draw
/// from independent streams so changing one never perturbs the others.
enum class Stream : std::uint64_t {
  target = 1,
  design = 2,
  noise = 3,
  rotation = 4,
  perturbation = 5,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for the stream identified by (master seed, trial index, stream tag).
/// Results are independent of the order in which trials are evaluated.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t trial, Stream tag);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::uint64_t trial, Stream tag)
      : engine_(stream_seed(master, trial, tag)) {}

  double gaussian() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  /// rows x cols matrix of i.i.d. N(0, 1) entries, filled row by row.
  Matrix gaussian_matrix(Index rows, Index cols);
  /// rows x cols matrix of i.i.d. Uniform[lo, hi) entries, filled row by row.
  Matrix uniform_matrix(Index rows, Index cols, double lo, double hi);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace rankadapt
