#include "rankadapt/rng.hpp"

namespace rankadapt {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t trial, Stream tag) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ trial);
  return mix64(h ^ static_cast<std::uint64_t>(tag));
}

Matrix Rng::gaussian_matrix(Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = gaussian();
  return M;
}

Matrix Rng::uniform_matrix(Index rows, Index cols, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = dist(engine_);
  return M;
}

}  // namespace rankadapt
