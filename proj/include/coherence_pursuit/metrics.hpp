#pragma once

#include "coherence_pursuit/types.hpp"

namespace cop {

/// ||U - Uh Uh^T U||_F / ||U||_F. The two bases may differ in dimension but
/// must share the ambient dimension.
double recovery_error(const SubspaceBasis& u_true, const SubspaceBasis& u_hat);

/// Success threshold on recovery_error used by the synthetic experiments.
inline constexpr double kRecoveryThreshold = 1e-5;

}  // namespace cop
