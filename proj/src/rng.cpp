#include "coherence_pursuit/rng.hpp"

namespace cop {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Murmur3 fmix64, used for key derivation so keys and outputs use different mixers.
constexpr std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xFF51AFD7ED558CCDULL;
  k ^= k >> 33;
  k *= 0xC4CEB9FE1A85EC53ULL;
  k ^= k >> 33;
  return k;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(fmix64(mix64(seed) ^ fmix64(stream + kGolden))) {}

Rng::result_type Rng::operator()() {
  return mix64(key_ + (++counter_) * kGolden);
}

Rng Rng::split(std::uint64_t id) const { return Rng(key_, id + 1); }

double Rng::normal() { return normal_(*this); }

double Rng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(*this);
}

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return g;
}

Matrix sample_unit_sphere(Index m, Index count, Rng& rng) {
  Matrix g(m, count);
  for (Index j = 0; j < count; ++j) {
    double norm = 0.0;
    // A zero Gaussian vector has probability zero; redraw anyway.
    do {
      for (Index i = 0; i < m; ++i) g(i, j) = rng.normal();
      norm = g.col(j).norm();
    } while (norm == 0.0);
    g.col(j) /= norm;
  }
  return g;
}

Matrix sample_unit_sphere(Index m, Index count, std::uint64_t seed) {
  Rng rng(seed);
  return sample_unit_sphere(m, count, rng);
}

}  // namespace cop
