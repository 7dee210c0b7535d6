#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

namespace cop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Exponent applied to each |x_i^T x_k| term of a coherence value.
enum class CoherencePower : int { Abs = 1, Squared = 2 };

inline int exponent(CoherencePower p) { return static_cast<int>(p); }
CoherencePower coherence_power_from_int(int p);

/// Throws InvalidArgument when the matrix is empty or has a NaN/Inf entry.
void require_data_matrix(const Matrix& d, std::string_view what);

/// Column-orthonormal m x r matrix. The constructor checks B^T B = I
/// entrywise to 1e-10 and 1 <= r <= m.
class SubspaceBasis {
 public:
  static constexpr double kOrthonormalTol = 1e-10;

  SubspaceBasis() = default;
  explicit SubspaceBasis(Matrix columns, bool non_unique = false);

  const Matrix& columns() const { return columns_; }
  Index ambient_dim() const { return columns_.rows(); }
  Index dim() const { return columns_.cols(); }
  bool empty() const { return columns_.size() == 0; }

  /// Set when the r-th and (r+1)-th singular values coincide, i.e. the
  /// truncated subspace is not uniquely defined.
  bool non_unique() const { return non_unique_; }

  Matrix projector() const { return columns_ * columns_.transpose(); }

 private:
  Matrix columns_;
  bool non_unique_ = false;
};

/// Per-column coherence values, tagged with the exponent that produced them.
struct CoherenceProfile {
  Vector values;
  CoherencePower power = CoherencePower::Squared;

  Index size() const { return values.size(); }
};

}  // namespace cop
