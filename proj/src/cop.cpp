#include "coherence_pursuit/cop.hpp"

#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cop {
namespace {

struct Prepared {
  NormalizedColumns cols;
  CoherenceProfile profile;
};

Prepared prepare(const Matrix& d, const CopConfig& cfg) {
  cfg.validate();
  Prepared p{normalize_columns(d, cfg.zero_columns), {}};
  if (p.cols.x.cols() < cfg.r)
    throw InvalidArgument("cop: " + std::to_string(p.cols.x.cols()) +
                          " usable columns, fewer than r=" + std::to_string(cfg.r));
  p.profile = coherence_kernel(p.cols.x, cfg.power, cfg.block, cfg.threads);
  return p;
}

Matrix gather(const Matrix& x, const std::vector<Index>& idx) {
  Matrix y(x.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) y.col(static_cast<Index>(j)) = x.col(idx[j]);
  return y;
}

std::vector<Index> to_input_indices(const std::vector<Index>& local,
                                    const std::vector<Index>& survivors) {
  std::vector<Index> out;
  out.reserve(local.size());
  for (Index j : local) out.push_back(survivors[static_cast<std::size_t>(j)]);
  return out;
}

SubspaceBasis exact_basis(const Matrix& y, Index r, double rank_tol) {
  SubspaceBasis b = orthonormal_basis(y, rank_tol);
  if (b.dim() != r)
    throw NumericalError("cop: sampled columns span " + std::to_string(b.dim()) +
                         " dimensions, expected r=" + std::to_string(r));
  return b;
}

SubspaceBasis truncated_basis(const Matrix& y, Index r) {
  if (y.cols() < r)
    throw NumericalError("cop: only " + std::to_string(y.cols()) +
                         " columns sampled, fewer than r=" + std::to_string(r));
  return top_r_singular_subspace(y, r);
}

std::uint64_t pass_seed(std::uint64_t seed, Index pass) {
  return Rng(seed).split(static_cast<std::uint64_t>(pass)).key();
}

double median(Vector v) {
  std::sort(v.data(), v.data() + v.size());
  const Index n = v.size();
  return n % 2 ? v(n / 2) : 0.5 * (v(n / 2 - 1) + v(n / 2));
}

std::vector<Index> adaptive_masked(const Matrix& x, const CoherenceProfile& prof, Index r,
                                   Index k, std::optional<double> upsilon, bool noisy,
                                   std::uint64_t seed, double rank_tol,
                                   const std::vector<bool>& excluded) {
  const Index n = x.cols();
  if (prof.size() != n) throw InvalidArgument("adaptive_sampling: profile length mismatch");
  if (r < 1) throw InvalidArgument("adaptive_sampling: r must be >= 1");
  if (k < 2) throw InvalidArgument("adaptive_sampling: k must be an integer >= 2");
  if (k * r > x.rows())
    throw InvalidArgument("adaptive_sampling: k r = " + std::to_string(k * r) +
                          " exceeds ambient dimension " + std::to_string(x.rows()));
  if (upsilon && *upsilon < 0) throw InvalidArgument("adaptive_sampling: upsilon must be >= 0");

  Matrix xp = random_projection(x, k * r, seed);
  const Vector initial = xp.colwise().norm().transpose();
  double threshold = 0.0;
  if (upsilon) {
    threshold = *upsilon;
  } else if (noisy) {
    threshold = 0.2 * median(initial);
  }

  Vector p = prof.values;
  std::vector<bool> blocked = excluded;
  Matrix f(xp.rows(), 0);
  std::vector<Index> picked;
  picked.reserve(static_cast<std::size_t>(r));
  for (Index round = 0; round < r; ++round) {
    Index best = -1;
    for (Index j = 0; j < n; ++j) {
      if (blocked[static_cast<std::size_t>(j)]) continue;
      const double norm = xp.col(j).norm();
      if (norm <= std::max(threshold, rank_tol * initial(j))) {
        p(j) = 0.0;
        continue;
      }
      if (best < 0 || p(j) > p(best)) best = j;
    }
    if (best < 0)
      throw NumericalError("adaptive_sampling: no eligible column left after " +
                           std::to_string(round) + " of " + std::to_string(r) + " picks");
    picked.push_back(best);
    p(best) = 0.0;
    blocked[static_cast<std::size_t>(best)] = true;

    Vector v = xp.col(best);
    if (f.cols() > 0) v -= f * (f.transpose() * v);
    v.normalize();
    f.conservativeResize(Eigen::NoChange, f.cols() + 1);
    f.col(f.cols() - 1) = v;
    const Eigen::RowVectorXd coeff = v.transpose() * xp;
    xp.noalias() -= v * coeff;
  }
  return picked;
}

}  // namespace

void CopConfig::validate() const {
  if (r < 1) throw InvalidArgument("cop: r must be >= 1");
  if (passes < 1) throw InvalidArgument("cop: passes h must be >= 1");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw InvalidArgument("cop: rank_tol must be in (0, 1)");
  if (block < 1) throw InvalidArgument("cop: block must be >= 1");
  if (const auto* tf = std::get_if<TopFraction>(&strategy)) {
    if (!(tf->q > 0.0 && tf->q < 1.0)) throw InvalidArgument("cop: q must be in (0, 1)");
  } else if (const auto* fc = std::get_if<FixedCount>(&strategy)) {
    if (fc->count < r) throw InvalidArgument("cop: fixed sample count must be >= r");
  } else if (const auto* ad = std::get_if<Adaptive>(&strategy)) {
    if (ad->k < 2) throw InvalidArgument("cop: k must be an integer >= 2");
    if (ad->upsilon && *ad->upsilon < 0) throw InvalidArgument("cop: upsilon must be >= 0");
  }
  if (passes > 1 && !std::holds_alternative<Adaptive>(strategy))
    throw InvalidArgument("cop: multiple passes require the adaptive strategy");
}

std::vector<Index> coherence_order(const CoherenceProfile& prof) {
  std::vector<Index> order(static_cast<std::size_t>(prof.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return prof.values(a) > prof.values(b); });
  return order;
}

std::vector<Index> greedy_rank_sampling(const Matrix& x, const CoherenceProfile& prof, Index r,
                                        double rank_tol) {
  if (prof.size() != x.cols()) throw InvalidArgument("greedy_rank_sampling: profile length mismatch");
  if (r < 1 || r > x.rows()) throw InvalidArgument("greedy_rank_sampling: need 1 <= r <= m");
  Matrix q(x.rows(), r);
  Index kept = 0;
  std::vector<Index> picked;
  for (Index j : coherence_order(prof)) {
    const auto col = x.col(j);
    const double norm = col.norm();
    Vector res = col;
    // Two Gram-Schmidt sweeps keep the residual accurate to round-off.
    for (int sweep = 0; sweep < 2 && kept > 0; ++sweep) {
      const auto qk = q.leftCols(kept);
      res -= qk * (qk.transpose() * res);
    }
    const double rn = res.norm();
    if (rn > rank_tol * norm) {
      q.col(kept++) = res / rn;
      picked.push_back(j);
      if (kept == r) return picked;
    }
  }
  throw NumericalError("greedy_rank_sampling: columns span only " + std::to_string(kept) +
                       " of r=" + std::to_string(r) + " dimensions");
}

std::vector<Index> top_count_sampling(const CoherenceProfile& prof, Index count) {
  if (count < 1) throw InvalidArgument("top_count_sampling: count must be >= 1");
  auto order = coherence_order(prof);
  order.resize(static_cast<std::size_t>(std::min<Index>(count, prof.size())));
  return order;
}

std::vector<Index> top_fraction_sampling(const CoherenceProfile& prof, double q) {
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("top_fraction_sampling: q must be in (0, 1)");
  const double n = static_cast<double>(prof.size());
  // The small offset absorbs round-off in (1 - q) n so e.g. q=0.4, n=10 keeps 6.
  const auto keep = static_cast<Index>(std::ceil((1.0 - q) * n - 1e-9));
  return top_count_sampling(prof, std::max<Index>(keep, 1));
}

std::vector<Index> adaptive_sampling(const Matrix& x, const CoherenceProfile& prof, Index r,
                                     Index k, std::optional<double> upsilon, bool noisy,
                                     std::uint64_t seed, double rank_tol) {
  return adaptive_masked(x, prof, r, k, upsilon, noisy, seed, rank_tol,
                         std::vector<bool>(static_cast<std::size_t>(x.cols()), false));
}

CopResult cop(const Matrix& d, const CopConfig& cfg) {
  if (cfg.passes > 1) return cop_multipass(d, cfg);
  Prepared prep = prepare(d, cfg);
  const Matrix& x = prep.cols.x;

  std::vector<Index> local;
  SubspaceBasis basis = std::visit(
      [&](const auto& s) -> SubspaceBasis {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GreedyRank>) {
          local = greedy_rank_sampling(x, prep.profile, cfg.r, cfg.rank_tol);
          return exact_basis(gather(x, local), cfg.r, cfg.rank_tol);
        } else if constexpr (std::is_same_v<S, TopFraction>) {
          local = top_fraction_sampling(prep.profile, s.q);
          return truncated_basis(gather(x, local), cfg.r);
        } else if constexpr (std::is_same_v<S, FixedCount>) {
          local = top_count_sampling(prep.profile, s.count);
          return truncated_basis(gather(x, local), cfg.r);
        } else {
          local = adaptive_sampling(x, prep.profile, cfg.r, s.k, s.upsilon, s.noisy,
                                    pass_seed(cfg.seed, 0), cfg.rank_tol);
          return exact_basis(gather(x, local), cfg.r, cfg.rank_tol);
        }
      },
      cfg.strategy);

  return CopResult{std::move(basis), to_input_indices(local, prep.cols.survivors),
                   std::move(prep.profile), std::move(prep.cols.dropped)};
}

CopResult cop_multipass(const Matrix& d, const CopConfig& cfg) {
  const auto* ad = std::get_if<Adaptive>(&cfg.strategy);
  if (!ad) throw InvalidArgument("cop_multipass: requires the adaptive strategy");
  Prepared prep = prepare(d, cfg);
  const Matrix& x = prep.cols.x;

  std::vector<bool> excluded(static_cast<std::size_t>(x.cols()), false);
  std::vector<Index> local;
  for (Index pass = 0; pass < cfg.passes; ++pass) {
    std::vector<Index> picks;
    try {
      picks = adaptive_masked(x, prep.profile, cfg.r, ad->k, ad->upsilon, ad->noisy,
                              pass_seed(cfg.seed, pass), cfg.rank_tol, excluded);
    } catch (const NumericalError& e) {
      throw NumericalError("cop_multipass: column pool exhausted in pass " +
                           std::to_string(pass + 1) + " of " + std::to_string(cfg.passes) +
                           " (" + e.what() + ")");
    }
    for (Index j : picks) {
      excluded[static_cast<std::size_t>(j)] = true;
      local.push_back(j);
    }
  }
  SubspaceBasis basis = truncated_basis(gather(x, local), cfg.r);
  return CopResult{std::move(basis), to_input_indices(local, prep.cols.survivors),
                   std::move(prep.profile), std::move(prep.cols.dropped)};
}

SubspaceBasis spca(const Matrix& d, Index r) {
  const NormalizedColumns cols = normalize_columns(d, ZeroColumnPolicy::Lenient);
  if (cols.x.cols() == 0) throw InvalidArgument("spca: every column is zero");
  return top_r_singular_subspace(cols.x, r);
}

}  // namespace cop
