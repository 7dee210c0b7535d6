#include "coherence_pursuit/clustering.hpp"

#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/parallel.hpp"
#include "coherence_pursuit/synth.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace cop {

std::vector<Index> Clustering::members(int id) const {
  std::vector<Index> out;
  for (std::size_t j = 0; j < assignment.size(); ++j)
    if (assignment[j] == id) out.push_back(static_cast<Index>(j));
  return out;
}

Clustering assign_to_subspaces(const Matrix& d, const std::vector<SubspaceBasis>& bases,
                               ZeroColumnPolicy policy, const Clustering* previous) {
  if (bases.empty()) throw InvalidArgument("assign_to_subspaces: no bases");
  for (const auto& b : bases) {
    if (b.empty() || b.ambient_dim() != d.rows())
      throw InvalidArgument("assign_to_subspaces: basis dimension does not match data");
  }
  if (previous && previous->size() != d.cols())
    throw InvalidArgument("assign_to_subspaces: previous clustering has wrong length");

  Clustering out;
  out.L = static_cast<int>(bases.size());
  out.assignment.assign(static_cast<std::size_t>(d.cols()), 1);

  std::vector<Matrix> proj;
  proj.reserve(bases.size());
  for (const auto& b : bases) proj.push_back(b.columns().transpose() * d);

  for (Index j = 0; j < d.cols(); ++j) {
    const double norm = d.col(j).norm();
    if (!(norm >= kZeroColumnNorm)) {
      if (policy == ZeroColumnPolicy::Strict)
        throw InvalidArgument("assign_to_subspaces: column " + std::to_string(j) + " is zero");
      out.assignment[static_cast<std::size_t>(j)] =
          previous ? previous->assignment[static_cast<std::size_t>(j)] : 1;
      continue;
    }
    int best = 1;
    double best_val = proj[0].col(j).norm() / norm;
    for (std::size_t k = 1; k < proj.size(); ++k) {
      const double v = proj[k].col(j).norm() / norm;
      if (v > best_val) {
        best_val = v;
        best = static_cast<int>(k) + 1;
      }
    }
    out.assignment[static_cast<std::size_t>(j)] = best;
  }
  return out;
}

CopConfig default_correction_config() {
  CopConfig cfg;
  cfg.power = CoherencePower::Squared;
  cfg.strategy = TopFraction{0.5};
  return cfg;
}

CorrectionResult correct_clustering(const Matrix& d, const Clustering& initial,
                                    const std::vector<Index>& ranks, int t, CopConfig cop_cfg,
                                    const Clustering* truth) {
  require_data_matrix(d, "correct_clustering");
  if (t < 1) throw InvalidArgument("correct_clustering: t must be >= 1");
  if (initial.size() != d.cols())
    throw InvalidArgument("correct_clustering: clustering length does not match data");
  if (initial.L < 1 || static_cast<std::size_t>(initial.L) != ranks.size())
    throw InvalidArgument("correct_clustering: need one rank per cluster");
  for (int a : initial.assignment)
    if (a < 1 || a > initial.L)
      throw InvalidArgument("correct_clustering: label outside 1..L");
  if (truth && (truth->size() != d.cols() || truth->L != initial.L))
    throw InvalidArgument("correct_clustering: ground truth does not match");

  CorrectionResult res;
  res.clustering = initial;
  if (truth) res.error_trajectory.push_back(clustering_error(initial, *truth));

  const auto L = static_cast<std::size_t>(initial.L);
  for (int it = 1; it <= t; ++it) {
    std::vector<std::vector<Index>> members(L);
    for (std::size_t c = 0; c < L; ++c) {
      members[c] = res.clustering.members(static_cast<int>(c) + 1);
      if (static_cast<Index>(members[c].size()) < ranks[c])
        throw NumericalError("correct_clustering: cluster " + std::to_string(c + 1) + " has " +
                             std::to_string(members[c].size()) + " columns, fewer than r=" +
                             std::to_string(ranks[c]) + ", at iteration " + std::to_string(it));
    }
    std::vector<SubspaceBasis> bases(L);
    parallel_for(L, cop_cfg.threads, [&](std::size_t c) {
      Matrix sub(d.rows(), static_cast<Index>(members[c].size()));
      for (std::size_t j = 0; j < members[c].size(); ++j) sub.col(static_cast<Index>(j)) = d.col(members[c][j]);
      CopConfig cfg = cop_cfg;
      cfg.r = ranks[c];
      cfg.threads = 1;
      bases[c] = cop(sub, cfg).basis;
    });
    Clustering next = assign_to_subspaces(d, bases, ZeroColumnPolicy::Lenient, &res.clustering);
    const bool unchanged = next.assignment == res.clustering.assignment;
    res.clustering = std::move(next);
    res.bases = std::move(bases);
    res.iterations_run = it;
    if (truth) res.error_trajectory.push_back(clustering_error(res.clustering, *truth));
    if (unchanged) {
      res.stopped_at_fixed_point = true;
      break;
    }
  }
  return res;
}

double clustering_error(const Clustering& pred, const Clustering& truth) {
  if (pred.size() != truth.size())
    throw InvalidArgument("clustering_error: clusterings have different lengths");
  if (pred.L != truth.L) throw InvalidArgument("clustering_error: cluster counts differ");
  if (pred.L < 1 || pred.L > 8) throw InvalidArgument("clustering_error: L must be in 1..8");
  if (pred.size() == 0) throw InvalidArgument("clustering_error: empty clustering");
  const auto L = static_cast<std::size_t>(pred.L);
  // confusion[a][b] = points with predicted label a+1 and true label b+1
  std::vector<std::vector<Index>> confusion(L, std::vector<Index>(L, 0));
  for (std::size_t j = 0; j < pred.assignment.size(); ++j) {
    const int a = pred.assignment[j], b = truth.assignment[j];
    if (a < 1 || a > pred.L || b < 1 || b > truth.L)
      throw InvalidArgument("clustering_error: label outside 1..L");
    ++confusion[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)];
  }
  std::vector<std::size_t> perm(L);
  std::iota(perm.begin(), perm.end(), 0);
  Index best = 0;
  do {
    Index agree = 0;
    for (std::size_t a = 0; a < L; ++a) agree += confusion[a][perm[a]];
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const auto n = static_cast<Index>(pred.size());
  return static_cast<double>(n - best) / static_cast<double>(n);
}

double ace(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.size() != truth.size()) throw InvalidArgument("ace: label vectors differ in length");
  double n1 = 0, n2 = 0, e1 = 0, e2 = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (truth[j] == kInlierLabel) {
      ++n1;
      if (pred[j] != kInlierLabel) ++e1;
    } else if (truth[j] == kOutlierLabel) {
      ++n2;
      if (pred[j] != kOutlierLabel) ++e2;
    } else {
      throw InvalidArgument("ace: truth labels must be inlier (1) or outlier (0)");
    }
  }
  if (n1 == 0 || n2 == 0) throw InvalidArgument("ace: truth must contain both classes");
  return 0.5 * (e1 / n1 + e2 / n2);
}

std::vector<int> classify_by_residual(const Matrix& d, const SubspaceBasis& basis,
                                      double threshold) {
  if (basis.empty() || basis.ambient_dim() != d.rows())
    throw InvalidArgument("classify_by_residual: basis dimension does not match data");
  const Matrix resid = deflate(d, basis);
  std::vector<int> out(static_cast<std::size_t>(d.cols()), kOutlierLabel);
  for (Index j = 0; j < d.cols(); ++j) {
    const double n = d.col(j).norm();
    if (n >= kZeroColumnNorm && resid.col(j).norm() <= threshold * n)
      out[static_cast<std::size_t>(j)] = kInlierLabel;
  }
  return out;
}

}  // namespace cop
