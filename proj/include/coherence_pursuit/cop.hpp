#pragma once

#include "coherence_pursuit/numeric.hpp"
#include "coherence_pursuit/types.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace cop {

/// Walk columns by decreasing coherence and keep those that add a new
/// direction until r are kept. Basis = orth of the kept columns.
struct GreedyRank {};

/// Keep the ceil((1 - q) n) most coherent columns, where q is an upper
/// bound on the outlier fraction. Basis = top-r singular subspace of the
/// survivors.
struct TopFraction {
  double q = 0.5;
};

/// Keep a fixed number of the most coherent columns, then take the top-r
/// singular subspace.
struct FixedCount {
  Index count = 20;
};

/// Randomized projection to k r dimensions followed by r rounds of
/// argmax-and-deflate. Redundant columns are never picked.
struct Adaptive {
  Index k = 2;
  /// Projected-norm threshold. When unset: 0, or 0.2 x the median projected
  /// column norm if `noisy` is set.
  std::optional<double> upsilon;
  bool noisy = false;
};

using SamplingStrategy = std::variant<GreedyRank, TopFraction, FixedCount, Adaptive>;

struct CopConfig {
  Index r = 1;
  CoherencePower power = CoherencePower::Squared;
  SamplingStrategy strategy = GreedyRank{};
  /// Number of adaptive sampling passes; > 1 requires the Adaptive strategy.
  Index passes = 1;
  double rank_tol = kDefaultRankTol;
  std::uint64_t seed = 0;
  Index block = kDefaultBlock;
  unsigned threads = 0;
  ZeroColumnPolicy zero_columns = ZeroColumnPolicy::Lenient;

  void validate() const;
};

struct CopResult {
  SubspaceBasis basis;
  /// Input-column indices of the columns that formed Y, in selection order.
  std::vector<Index> sampled_indices;
  /// One value per surviving (non-dropped) column, in input order.
  CoherenceProfile profile;
  std::vector<Index> dropped_columns;
};

/// Normalize, score by coherence, sample, and build an r-dimensional basis.
CopResult cop(const Matrix& d, const CopConfig& cfg);

/// Runs Adaptive sampling cfg.passes times, removing each pass's picks from
/// the pool, and returns the top-r singular subspace of all h r picks.
CopResult cop_multipass(const Matrix& d, const CopConfig& cfg);

/// Normalize columns, then the top-r principal directions.
SubspaceBasis spca(const Matrix& d, Index r);

// Sampling steps. Indices refer to columns of x / entries of the profile.

/// Columns ordered by decreasing coherence, ties to the lower index.
std::vector<Index> coherence_order(const CoherenceProfile& prof);

std::vector<Index> greedy_rank_sampling(const Matrix& x, const CoherenceProfile& prof, Index r,
                                        double rank_tol = kDefaultRankTol);

std::vector<Index> top_fraction_sampling(const CoherenceProfile& prof, double q);

std::vector<Index> top_count_sampling(const CoherenceProfile& prof, Index count);

/// Adaptive column sampling. Entries of `prof` that are zero are never
/// picked; callers use this to exclude columns. `rank_tol` adds a relative
/// floor to upsilon so that columns already inside span(F) up to round-off
/// are also excluded.
std::vector<Index> adaptive_sampling(const Matrix& x, const CoherenceProfile& prof, Index r,
                                     Index k, std::optional<double> upsilon, bool noisy,
                                     std::uint64_t seed, double rank_tol = kDefaultRankTol);

}  // namespace cop
