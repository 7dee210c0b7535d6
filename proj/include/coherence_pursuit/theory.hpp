#pragma once

#include "coherence_pursuit/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cop {

/// Sufficient conditions for coherence-based recovery. "Gap" conditions
/// guarantee that the expected inlier coherence is at least twice the
/// expected outlier coherence; "recovery"/"separation" conditions guarantee
/// every inlier outscores every outlier with high probability.
enum class ConditionKind {
  ExpectedGapAbs,        ///< unstructured outliers, p = 1, expectations
  ExpectedGapSquared,    ///< unstructured outliers, p = 2, expectations
  ExactRecoveryAbs,      ///< unstructured outliers, p = 1, prob >= 1 - 3 delta
  ExactRecoverySquared,  ///< unstructured outliers, p = 2, prob >= 1 - 4 delta
  StructuredGap,         ///< clustered outliers (mu < 1), raw Gram, expectations
  StructuredSeparation,  ///< clustered outliers (mu < 1), prob >= 1 - 6 delta
  NoisyGap,              ///< noisy inliers, raw Gram, expectations
  NoisySeparation,       ///< noisy inliers, prob >= 1 - 8 delta
  ClusteredGap,          ///< clustered inliers (nu < 1), raw Gram, expectations
};

std::string_view to_string(ConditionKind kind);
ConditionKind condition_kind_from_string(std::string_view name);
const std::vector<ConditionKind>& all_condition_kinds();
/// True for the high-probability (min inlier > max outlier) kinds.
bool is_separation_kind(ConditionKind kind);
/// Exponent of the coherence statistic the condition speaks about.
CoherencePower condition_power(ConditionKind kind);

struct ConditionParams {
  double m = 0;
  double r = 0;
  double n1 = 0;
  double n2 = 0;
  double delta = 0.05;
  std::optional<double> mu;
  std::optional<double> sigma_n;
  std::optional<double> nu;
};

struct ConditionReport {
  ConditionKind kind{};
  double lhs = 0;
  double rhs = 0;
  bool holds = false;  ///< lhs > rhs
  std::vector<std::pair<std::string, double>> intermediates;

  /// Single-line comma-separated key=value record.
  std::string to_record() const;
};

/// Evaluates the displayed inequality for `kind` term by term.
ConditionReport check_condition(ConditionKind kind, const ConditionParams& params);

enum class CoherenceRole { Inlier, Outlier };
enum class BoundType { Exact, Lower, Upper };

struct ExpectedCoherence {
  double value = 0;
  BoundType bound = BoundType::Exact;
};

/// Expected coherence of one inlier/outlier column under the unstructured
/// model. p=2 inlier: exact (n1-1)/r + n2/m. p=2 outlier: upper bound
/// (r n1 + n2 - 1)/m. p=1 inlier: lower bound (n1-1) sqrt(2/(pi r)) +
/// n2 sqrt(2/(pi m)). p=1 outlier: upper bound n1 sqrt(r/m) + (n2-1)/sqrt(m).
ExpectedCoherence expected_coherence(CoherenceRole role, CoherencePower p, double m, double r,
                                     double n1, double n2);

/// f(t) = P(|q^T b|^2 > t/m) for independent uniform unit vectors in R^m,
/// i.e. the upper tail 1 - I_{t/m}(1/2, (m-1)/2) of a Beta(1/2, (m-1)/2)
/// variable. Computed by adaptive Gauss-Kronrod quadrature on the upper
/// tail (after s = sqrt(x), which removes the endpoint singularity).
double tail_f(double t, double m);

/// inf{t : f(t) < delta}, by bisection to 1e-8 absolute.
double t_delta(double delta, double m);

/// Monte Carlo bridge: draws `trials` datasets from the model the condition
/// describes and returns the fraction of trials where the condition's
/// conclusion holds (mean inlier > 2 x mean outlier for gap kinds; min
/// inlier > max outlier for separation kinds).
double validate_condition_empirically(ConditionKind kind, const ConditionParams& params,
                                      Index trials, std::uint64_t seed, unsigned threads = 0);

}  // namespace cop
