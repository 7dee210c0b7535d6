#include "coherence_pursuit/numeric.hpp"

#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/parallel.hpp"
#include "coherence_pursuit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cop {

CoherencePower coherence_power_from_int(int p) {
  if (p == 1) return CoherencePower::Abs;
  if (p == 2) return CoherencePower::Squared;
  throw InvalidArgument("coherence exponent must be 1 or 2, got " + std::to_string(p));
}

void require_data_matrix(const Matrix& d, std::string_view what) {
  if (d.rows() < 1 || d.cols() < 1)
    throw InvalidArgument(std::string(what) + ": matrix must have at least one row and column");
  if (!d.allFinite())
    throw InvalidArgument(std::string(what) + ": matrix contains NaN or Inf");
}

SubspaceBasis::SubspaceBasis(Matrix columns, bool non_unique)
    : columns_(std::move(columns)), non_unique_(non_unique) {
  const Index m = columns_.rows();
  const Index r = columns_.cols();
  if (r < 1 || r > m)
    throw InvalidArgument("subspace basis needs 1 <= r <= m (m=" + std::to_string(m) +
                          ", r=" + std::to_string(r) + ")");
  if (!columns_.allFinite()) throw InvalidArgument("subspace basis contains NaN or Inf");
  const double dev =
      (columns_.transpose() * columns_ - Matrix::Identity(r, r)).cwiseAbs().maxCoeff();
  if (dev > kOrthonormalTol)
    throw InvalidArgument("subspace basis columns are not orthonormal (max |B^T B - I| = " +
                          std::to_string(dev) + ")");
}

NormalizedColumns normalize_columns(const Matrix& d, ZeroColumnPolicy policy) {
  require_data_matrix(d, "normalize_columns");
  NormalizedColumns out;
  out.survivors.reserve(static_cast<std::size_t>(d.cols()));
  for (Index j = 0; j < d.cols(); ++j) {
    if (d.col(j).norm() < kZeroColumnNorm) {
      if (policy == ZeroColumnPolicy::Strict)
        throw InvalidArgument("normalize_columns: column " + std::to_string(j) +
                              " has zero norm");
      out.dropped.push_back(j);
    } else {
      out.survivors.push_back(j);
    }
  }
  out.x.resize(d.rows(), static_cast<Index>(out.survivors.size()));
  for (Index k = 0; k < out.x.cols(); ++k) {
    const auto src = d.col(out.survivors[static_cast<std::size_t>(k)]);
    out.x.col(k) = src / src.norm();
  }
  return out;
}

namespace {

CoherenceProfile blocked_coherence(const Matrix& x, CoherencePower p, Index block,
                                   unsigned threads, bool unit_columns) {
  if (block < 1) throw InvalidArgument("coherence block size must be >= 1");
  const Index n = x.cols();
  CoherenceProfile out{Vector(n), p};
  const Index panels = (n + block - 1) / block;
  parallel_for(static_cast<std::size_t>(panels), threads, [&](std::size_t b) {
    const Index start = static_cast<Index>(b) * block;
    const Index width = std::min(block, n - start);
    Matrix g(n, width);
    g.noalias() = x.transpose() * x.middleCols(start, width);
    for (Index j = 0; j < width; ++j) {
      const auto col = g.col(j);
      double total;
      double self;
      if (p == CoherencePower::Abs) {
        total = col.cwiseAbs().sum();
        self = unit_columns ? 1.0 : std::abs(g(start + j, j));
      } else {
        total = col.squaredNorm();
        self = unit_columns ? 1.0 : g(start + j, j) * g(start + j, j);
      }
      out.values(start + j) = std::max(0.0, total - self);
    }
  });
  return out;
}

}  // namespace

CoherenceProfile coherence_kernel(const Matrix& x, CoherencePower p, Index block,
                                  unsigned threads) {
  require_data_matrix(x, "coherence_kernel");
  for (Index j = 0; j < x.cols(); ++j) {
    if (std::abs(x.col(j).norm() - 1.0) > kUnitColumnTol)
      throw InvalidArgument("coherence_kernel: column " + std::to_string(j) +
                            " is not unit norm");
  }
  return blocked_coherence(x, p, block, threads, true);
}

CoherenceProfile raw_gram_coherence(const Matrix& d, CoherencePower p, Index block,
                                    unsigned threads) {
  require_data_matrix(d, "raw_gram_coherence");
  return blocked_coherence(d, p, block, threads, false);
}

SubspaceBasis orthonormal_basis(const Matrix& m, double tol) {
  require_data_matrix(m, "orthonormal_basis");
  if (m.colwise().norm().maxCoeff() <= tol)
    throw InvalidArgument("orthonormal_basis: every column is below the rank tolerance");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  while (rank < s.size() && s(rank) > tol * s(0)) ++rank;
  return SubspaceBasis(svd.matrixU().leftCols(rank));
}

SubspaceBasis top_r_singular_subspace(const Matrix& m, Index r) {
  require_data_matrix(m, "top_r_singular_subspace");
  if (r < 1 || r > std::min(m.rows(), m.cols()))
    throw InvalidArgument("top_r_singular_subspace: need 1 <= r <= min(m, n), got r=" +
                          std::to_string(r));
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  bool non_unique = false;
  if (r < s.size()) non_unique = std::abs(s(r - 1) - s(r)) <= 1e-12 * std::max(1.0, s(0));
  return SubspaceBasis(svd.matrixU().leftCols(r), non_unique);
}

Matrix gaussian_projection(Index d, Index m, std::uint64_t seed) {
  if (d < 1 || m < 1) throw InvalidArgument("gaussian_projection: dimensions must be >= 1");
  Rng rng(seed);
  return gaussian_matrix(d, m, rng) / std::sqrt(static_cast<double>(d));
}

Matrix random_projection(const Matrix& x, Index d, std::uint64_t seed, ProjectionMode mode) {
  require_data_matrix(x, "random_projection");
  if (d < 1 || d > x.rows())
    throw InvalidArgument("random_projection: target dimension " + std::to_string(d) +
                          " outside [1, " + std::to_string(x.rows()) + "]");
  if (mode == ProjectionMode::Identity) {
    if (d != x.rows()) throw InvalidArgument("random_projection: identity mode needs d == m");
    return x;
  }
  Matrix out(d, x.cols());
  out.noalias() = gaussian_projection(d, x.rows(), seed) * x;
  return out;
}

Matrix deflate(const Matrix& x, const Matrix& orthonormal_columns) {
  if (orthonormal_columns.rows() != x.rows())
    throw InvalidArgument("deflate: ambient dimension mismatch (" +
                          std::to_string(x.rows()) + " vs " +
                          std::to_string(orthonormal_columns.rows()) + ")");
  Matrix coeff = orthonormal_columns.transpose() * x;
  Matrix out = x;
  out.noalias() -= orthonormal_columns * coeff;
  return out;
}

Matrix deflate(const Matrix& x, const SubspaceBasis& b) { return deflate(x, b.columns()); }

}  // namespace cop
