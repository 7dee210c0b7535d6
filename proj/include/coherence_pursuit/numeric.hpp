#pragma once

#include "coherence_pursuit/types.hpp"

#include <cstdint>
#include <vector>

namespace cop {

inline constexpr Index kDefaultBlock = 256;
inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kZeroColumnNorm = 1e-14;
inline constexpr double kUnitColumnTol = 1e-8;

enum class ZeroColumnPolicy {
  Strict,   ///< a column with norm < 1e-14 is an error
  Lenient,  ///< such columns are dropped and reported
};

struct NormalizedColumns {
  Matrix x;                     ///< surviving columns scaled to unit l2 norm
  std::vector<Index> survivors; ///< survivors[j] = input index of column j of x
  std::vector<Index> dropped;   ///< input indices removed as numerically zero
};

NormalizedColumns normalize_columns(const Matrix& d,
                                    ZeroColumnPolicy policy = ZeroColumnPolicy::Strict);

/// Coherence value of every column of a unit-column matrix:
///   p(i) = sum_{k != i} |x_i^T x_k|^p.
///
/// X^T X is formed one panel of `block` columns at a time, so the extra
/// memory is n * block doubles. The diagonal is removed by subtracting the
/// self term, which is 1 for unit columns. Each output entry is produced by
/// exactly one panel, so the result does not depend on `threads`.
CoherenceProfile coherence_kernel(const Matrix& x, CoherencePower p,
                                  Index block = kDefaultBlock, unsigned threads = 0);

/// Same sum over the raw Gram matrix D^T D (no normalization, no unit-norm
/// check); the diagonal term |d_i^T d_i|^p is subtracted. Used where the
/// analysis is stated on unnormalized data.
CoherenceProfile raw_gram_coherence(const Matrix& d, CoherencePower p,
                                    Index block = kDefaultBlock, unsigned threads = 0);

/// Orthonormal basis for range(M). Numerical rank counts singular values
/// above tol * sigma_max.
SubspaceBasis orthonormal_basis(const Matrix& m, double tol = kDefaultRankTol);

/// Left singular subspace of the r largest singular values. The result is
/// flagged non_unique() when sigma_r and sigma_{r+1} agree to 1e-12.
SubspaceBasis top_r_singular_subspace(const Matrix& m, Index r);

enum class ProjectionMode { Gaussian, Identity };

/// d x m matrix with i.i.d. N(0, 1/d) entries.
Matrix gaussian_projection(Index d, Index m, std::uint64_t seed);

/// Phi * X with Phi from gaussian_projection(d, m, seed). Identity mode is a
/// test hook that requires d == m and returns X.
Matrix random_projection(const Matrix& x, Index d, std::uint64_t seed,
                         ProjectionMode mode = ProjectionMode::Gaussian);

/// X - B B^T X.
Matrix deflate(const Matrix& x, const SubspaceBasis& b);
Matrix deflate(const Matrix& x, const Matrix& orthonormal_columns);

}  // namespace cop
