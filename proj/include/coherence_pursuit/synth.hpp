#pragma once

#include "coherence_pursuit/types.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace cop {

inline constexpr int kInlierLabel = 1;
inline constexpr int kOutlierLabel = 0;

/// Inliers uniform on the unit sphere of a random r-dim subspace, outliers
/// uniform on the unit sphere of R^m.
struct Unstructured {};

/// Outliers b_j = (q + mu b'_j) / sqrt(1 + mu^2) clustered around a random
/// unit direction q. Inliers are unstructured unless inlier_nu is set, in
/// which case they are clustered as in ClusteredInliers.
struct StructuredOutliers {
  double mu = 1.0;
  std::optional<double> inlier_nu;
};

/// Inliers a^e_i = (a_i + alpha_i e_i) / sqrt(1 + sigma_n^2) with e_i uniform
/// on the sphere and alpha_i ~ N(0, sigma_n^2).
struct NoisyInliers {
  double sigma_n = 0.1;
};

/// D = [A B] + E where each column of E is isotropic Gaussian scaled so that
/// E||e|| = tau (inlier columns have unit norm, so tau is the noise-to-signal
/// norm ratio). Noise is added to every column.
struct AdditiveNoise {
  double tau = 0.5;
};

/// Inliers a_i = (t + nu a'_i) / sqrt(1 + nu^2) with t, a'_i uniform on the
/// subspace's unit sphere.
struct ClusteredInliers {
  double nu = 0.5;
};

/// L independent random subspaces; cluster i has dims[i] dimensions and
/// sizes[i] points. Labels are cluster ids 1..L. r, n1 and n2 are ignored.
struct UnionOfSubspaces {
  std::vector<Index> dims;
  std::vector<Index> sizes;
};

using ModelKind = std::variant<Unstructured, StructuredOutliers, NoisyInliers, AdditiveNoise,
                               ClusteredInliers, UnionOfSubspaces>;

struct ModelSpec {
  ModelKind kind = Unstructured{};
  Index m = 100;
  Index r = 5;
  Index n1 = 50;
  Index n2 = 50;
  std::uint64_t seed = 0;
  /// Apply a random column permutation (labels permuted alongside).
  bool shuffle = false;

  void validate() const;
};

struct LabeledDataset {
  Matrix d;
  /// kInlierLabel / kOutlierLabel, or cluster id 1..L for unions.
  std::vector<int> labels;
  /// The true subspace, or one per cluster for unions.
  std::vector<SubspaceBasis> subspaces;
  /// Noise-free inlier columns for the noisy models, in generation order.
  std::optional<Matrix> noise_free_inliers;
  /// permutation[j] = generation index of output column j (identity unless shuffled).
  std::vector<Index> permutation;

  const SubspaceBasis& subspace() const { return subspaces.front(); }
};

/// Dispatches on spec.kind. Every generator is a pure function of its spec.
LabeledDataset generate(const ModelSpec& spec);

LabeledDataset gen_unstructured(const ModelSpec& spec);
LabeledDataset gen_structured_outliers(const ModelSpec& spec);
LabeledDataset gen_noisy(const ModelSpec& spec);
LabeledDataset gen_additive_noise(const ModelSpec& spec);
LabeledDataset gen_clustered_inliers(const ModelSpec& spec);
LabeledDataset gen_union_subspaces(const ModelSpec& spec);

/// Orthonormal basis of a uniformly random r-dim subspace of R^m.
SubspaceBasis random_subspace(Index m, Index r, std::uint64_t seed);

/// sigma_n giving E||alpha e|| / E||a|| = tau for unit a and e:
/// E|alpha| = sigma_n sqrt(2/pi), hence sigma_n = tau sqrt(pi/2).
double sigma_from_tau(double tau);

/// Standard deviation s with E||g|| = tau for g ~ N(0, s^2 I_m).
double gaussian_scale_for_mean_norm(double tau, Index m);

/// Reassigns round(fraction n) uniformly chosen points to a uniformly chosen
/// wrong cluster. Labels are 1..L.
std::vector<int> corrupt_labels(const std::vector<int>& labels, int clusters, double fraction,
                                std::uint64_t seed);

}  // namespace cop
