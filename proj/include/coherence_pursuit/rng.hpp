#pragma once

#include "coherence_pursuit/types.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace cop {

/// Counter-based 64-bit generator. Output n of stream (seed, id) is
/// mix(key + n * golden), so streams are addressable without state sharing:
/// split() derives an independent child stream per trial or per cell.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Child stream; a pure function of (this stream's key, id), independent
  /// of how many numbers have been drawn so far.
  Rng split(std::uint64_t id) const;

  std::uint64_t key() const { return key_; }

  double normal();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> normal_;
};

/// rows x cols matrix of i.i.d. N(0, 1) entries, filled column by column.
Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);

/// count columns drawn uniformly from the unit sphere in R^m.
Matrix sample_unit_sphere(Index m, Index count, Rng& rng);
Matrix sample_unit_sphere(Index m, Index count, std::uint64_t seed);

}  // namespace cop
