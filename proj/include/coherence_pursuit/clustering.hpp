#pragma once

#include "coherence_pursuit/cop.hpp"
#include "coherence_pursuit/numeric.hpp"
#include "coherence_pursuit/types.hpp"

#include <optional>
#include <vector>

namespace cop {

/// Hard assignment of columns to clusters 1..L.
struct Clustering {
  std::vector<int> assignment;
  int L = 0;

  Index size() const { return static_cast<Index>(assignment.size()); }
  /// Input indices of the columns in cluster `id`.
  std::vector<Index> members(int id) const;
};

/// Assigns every column of `d` to argmax_k ||x^T U_k||_2 over the given bases
/// (x = normalized column). Ties go to the lowest cluster id. Zero columns
/// throw under Strict; under Lenient they keep their label from `previous`
/// (or cluster 1 when no previous clustering is given).
Clustering assign_to_subspaces(const Matrix& d, const std::vector<SubspaceBasis>& bases,
                               ZeroColumnPolicy policy = ZeroColumnPolicy::Strict,
                               const Clustering* previous = nullptr);

struct CorrectionResult {
  Clustering clustering;
  std::vector<SubspaceBasis> bases;
  /// Clustering error after each iteration, entry 0 being the initial
  /// clustering. Empty when no ground truth was supplied.
  std::vector<double> error_trajectory;
  int iterations_run = 0;
  bool stopped_at_fixed_point = false;
};

/// Default inner configuration: p = 2, top half of the columns by coherence.
CopConfig default_correction_config();

/// Alternates per-cluster CoP (rank ranks[i] for cluster i+1) with
/// reassignment for at most t rounds, stopping early once the assignment no
/// longer changes. cop_cfg.r is overridden per cluster.
CorrectionResult correct_clustering(const Matrix& d, const Clustering& initial,
                                    const std::vector<Index>& ranks, int t,
                                    CopConfig cop_cfg = default_correction_config(),
                                    const Clustering* truth = nullptr);

/// Fraction of misclassified points under the best label permutation
/// (exhaustive, L <= 8).
double clustering_error(const Clustering& pred, const Clustering& truth);

/// 0.5 (n1e / n1 + n2e / n2) for inlier/outlier labels (kInlierLabel /
/// kOutlierLabel).
double ace(const std::vector<int>& pred, const std::vector<int>& truth);

/// Labels a column inlier when its relative residual ||x - U U^T x|| / ||x||
/// is at most `threshold`.
std::vector<int> classify_by_residual(const Matrix& d, const SubspaceBasis& basis,
                                      double threshold = 0.2);

}  // namespace cop
