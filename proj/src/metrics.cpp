#include "coherence_pursuit/metrics.hpp"

#include "coherence_pursuit/errors.hpp"

namespace cop {

double recovery_error(const SubspaceBasis& u_true, const SubspaceBasis& u_hat) {
  if (u_true.empty() || u_hat.empty()) throw InvalidArgument("recovery_error: empty basis");
  if (u_true.ambient_dim() != u_hat.ambient_dim())
    throw InvalidArgument("recovery_error: ambient dimensions differ");
  const Matrix& u = u_true.columns();
  const Matrix& uh = u_hat.columns();
  const Matrix resid = u - uh * (uh.transpose() * u);
  return resid.norm() / u.norm();
}

}  // namespace cop
