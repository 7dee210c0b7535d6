#include "coherence_pursuit/synth.hpp"

#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace cop {
namespace {

// Sub-stream ids, fixed so that each component of a dataset is reproducible
// independently of the others.
enum Stream : std::uint64_t {
  kSubspace = 0,
  kInliers = 1,
  kOutliers = 2,
  kNoise = 3,
  kShuffle = 4,
  kCenter = 5,
  kNoiseScale = 6,
};

Matrix inliers_in(const SubspaceBasis& u, Index count, Rng rng) {
  return u.columns() * sample_unit_sphere(u.dim(), count, rng);
}

Matrix clustered_in(const SubspaceBasis& u, Index count, double nu, Rng center_rng, Rng rng) {
  const Vector t = u.columns() * sample_unit_sphere(u.dim(), 1, center_rng).col(0);
  Matrix a = u.columns() * sample_unit_sphere(u.dim(), count, rng);
  a = (a * nu).colwise() + t;
  return a / std::sqrt(1.0 + nu * nu);
}

LabeledDataset assemble(const ModelSpec& spec, Matrix inliers, Matrix outliers,
                        SubspaceBasis u) {
  LabeledDataset ds;
  ds.d.resize(spec.m, spec.n1 + spec.n2);
  ds.d.leftCols(spec.n1) = inliers;
  ds.d.rightCols(spec.n2) = outliers;
  ds.labels.assign(static_cast<std::size_t>(spec.n1), kInlierLabel);
  ds.labels.resize(static_cast<std::size_t>(spec.n1 + spec.n2), kOutlierLabel);
  ds.subspaces.push_back(std::move(u));
  return ds;
}

void finish(const ModelSpec& spec, LabeledDataset& ds) {
  const Index n = ds.d.cols();
  ds.permutation.resize(static_cast<std::size_t>(n));
  std::iota(ds.permutation.begin(), ds.permutation.end(), Index{0});
  if (!spec.shuffle) return;
  Rng rng = Rng(spec.seed).split(kShuffle);
  std::shuffle(ds.permutation.begin(), ds.permutation.end(), rng);
  Matrix d(ds.d.rows(), n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const Index src = ds.permutation[static_cast<std::size_t>(j)];
    d.col(j) = ds.d.col(src);
    labels[static_cast<std::size_t>(j)] = ds.labels[static_cast<std::size_t>(src)];
  }
  ds.d = std::move(d);
  ds.labels = std::move(labels);
}

template <class Kind>
const Kind& require_kind(const ModelSpec& spec, const char* name) {
  const auto* k = std::get_if<Kind>(&spec.kind);
  if (!k) throw InvalidArgument(std::string(name) + ": model spec has a different kind");
  spec.validate();
  return *k;
}

}  // namespace

void ModelSpec::validate() const {
  if (m < 1) throw InvalidArgument("model: m must be >= 1");
  if (const auto* u = std::get_if<UnionOfSubspaces>(&kind)) {
    if (u->dims.empty() || u->dims.size() != u->sizes.size())
      throw InvalidArgument("model: union needs matching non-empty dims and sizes");
    Index total = 0;
    for (std::size_t i = 0; i < u->dims.size(); ++i) {
      if (u->dims[i] < 1 || u->sizes[i] < 1)
        throw InvalidArgument("model: union dims and sizes must be >= 1");
      total += u->dims[i];
    }
    if (total > m)
      throw InvalidArgument("model: union subspace dims sum to " + std::to_string(total) +
                            ", exceeding m=" + std::to_string(m));
    return;
  }
  if (r < 1 || r >= m) throw InvalidArgument("model: need 1 <= r < m");
  if (n1 < 0 || n2 < 0 || n1 + n2 < 1) throw InvalidArgument("model: need n1, n2 >= 0 and n1 + n2 >= 1");
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, StructuredOutliers>) {
          if (!(k.mu > 0)) throw InvalidArgument("model: mu must be > 0");
          if (k.inlier_nu && !(*k.inlier_nu > 0)) throw InvalidArgument("model: nu must be > 0");
        } else if constexpr (std::is_same_v<K, NoisyInliers>) {
          if (!(k.sigma_n >= 0)) throw InvalidArgument("model: sigma_n must be >= 0");
        } else if constexpr (std::is_same_v<K, AdditiveNoise>) {
          if (!(k.tau >= 0)) throw InvalidArgument("model: tau must be >= 0");
        } else if constexpr (std::is_same_v<K, ClusteredInliers>) {
          if (!(k.nu > 0)) throw InvalidArgument("model: nu must be > 0");
        }
      },
      kind);
}

SubspaceBasis random_subspace(Index m, Index r, std::uint64_t seed) {
  if (r < 1 || r > m) throw InvalidArgument("random_subspace: need 1 <= r <= m");
  Rng rng(seed);
  const Matrix g = gaussian_matrix(m, r, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(m, r);
  return SubspaceBasis(std::move(q));
}

LabeledDataset gen_unstructured(const ModelSpec& spec) {
  require_kind<Unstructured>(spec, "gen_unstructured");
  const Rng base(spec.seed);
  SubspaceBasis u = random_subspace(spec.m, spec.r, base.split(kSubspace).key());
  Matrix a = inliers_in(u, spec.n1, base.split(kInliers));
  Rng out_rng = base.split(kOutliers);
  Matrix b = sample_unit_sphere(spec.m, spec.n2, out_rng);
  LabeledDataset ds = assemble(spec, std::move(a), std::move(b), std::move(u));
  finish(spec, ds);
  return ds;
}

LabeledDataset gen_structured_outliers(const ModelSpec& spec) {
  const auto& kind = require_kind<StructuredOutliers>(spec, "gen_structured_outliers");
  const Rng base(spec.seed);
  SubspaceBasis u = random_subspace(spec.m, spec.r, base.split(kSubspace).key());
  Matrix a = kind.inlier_nu
                 ? clustered_in(u, spec.n1, *kind.inlier_nu, base.split(kCenter).split(0),
                                base.split(kInliers))
                 : inliers_in(u, spec.n1, base.split(kInliers));
  Rng center = base.split(kCenter).split(1);
  const Vector q = sample_unit_sphere(spec.m, 1, center).col(0);
  Rng out_rng = base.split(kOutliers);
  Matrix b = sample_unit_sphere(spec.m, spec.n2, out_rng);
  b = (b * kind.mu).colwise() + q;
  b /= std::sqrt(1.0 + kind.mu * kind.mu);
  LabeledDataset ds = assemble(spec, std::move(a), std::move(b), std::move(u));
  finish(spec, ds);
  return ds;
}

LabeledDataset gen_noisy(const ModelSpec& spec) {
  const auto& kind = require_kind<NoisyInliers>(spec, "gen_noisy");
  const Rng base(spec.seed);
  SubspaceBasis u = random_subspace(spec.m, spec.r, base.split(kSubspace).key());
  Matrix a = inliers_in(u, spec.n1, base.split(kInliers));
  Rng noise_rng = base.split(kNoise);
  const Matrix e = sample_unit_sphere(spec.m, spec.n1, noise_rng);
  Rng alpha_rng = base.split(kNoiseScale);
  Matrix ae(spec.m, spec.n1);
  const double scale = 1.0 / std::sqrt(1.0 + kind.sigma_n * kind.sigma_n);
  for (Index j = 0; j < spec.n1; ++j) {
    const double alpha = kind.sigma_n * alpha_rng.normal();
    ae.col(j) = (a.col(j) + alpha * e.col(j)) * scale;
  }
  Rng out_rng = base.split(kOutliers);
  Matrix b = sample_unit_sphere(spec.m, spec.n2, out_rng);
  LabeledDataset ds = assemble(spec, std::move(ae), std::move(b), std::move(u));
  ds.noise_free_inliers = std::move(a);
  finish(spec, ds);
  return ds;
}

LabeledDataset gen_additive_noise(const ModelSpec& spec) {
  const auto& kind = require_kind<AdditiveNoise>(spec, "gen_additive_noise");
  const Rng base(spec.seed);
  SubspaceBasis u = random_subspace(spec.m, spec.r, base.split(kSubspace).key());
  Matrix a = inliers_in(u, spec.n1, base.split(kInliers));
  Rng out_rng = base.split(kOutliers);
  Matrix b = sample_unit_sphere(spec.m, spec.n2, out_rng);
  LabeledDataset ds = assemble(spec, a, std::move(b), std::move(u));
  Rng noise_rng = base.split(kNoise);
  ds.d += gaussian_matrix(spec.m, ds.d.cols(), noise_rng) *
          gaussian_scale_for_mean_norm(kind.tau, spec.m);
  ds.noise_free_inliers = std::move(a);
  finish(spec, ds);
  return ds;
}

LabeledDataset gen_clustered_inliers(const ModelSpec& spec) {
  const auto& kind = require_kind<ClusteredInliers>(spec, "gen_clustered_inliers");
  const Rng base(spec.seed);
  SubspaceBasis u = random_subspace(spec.m, spec.r, base.split(kSubspace).key());
  Matrix a = clustered_in(u, spec.n1, kind.nu, base.split(kCenter).split(0), base.split(kInliers));
  Rng out_rng = base.split(kOutliers);
  Matrix b = sample_unit_sphere(spec.m, spec.n2, out_rng);
  LabeledDataset ds = assemble(spec, std::move(a), std::move(b), std::move(u));
  finish(spec, ds);
  return ds;
}

LabeledDataset gen_union_subspaces(const ModelSpec& spec) {
  const auto& kind = require_kind<UnionOfSubspaces>(spec, "gen_union_subspaces");
  const Rng base(spec.seed);
  const Index n = std::accumulate(kind.sizes.begin(), kind.sizes.end(), Index{0});
  LabeledDataset ds;
  ds.d.resize(spec.m, n);
  Index col = 0;
  for (std::size_t i = 0; i < kind.dims.size(); ++i) {
    const Rng cluster = base.split(100 + i);
    SubspaceBasis u = random_subspace(spec.m, kind.dims[i], cluster.split(kSubspace).key());
    ds.d.middleCols(col, kind.sizes[i]) = inliers_in(u, kind.sizes[i], cluster.split(kInliers));
    ds.labels.insert(ds.labels.end(), static_cast<std::size_t>(kind.sizes[i]),
                     static_cast<int>(i) + 1);
    ds.subspaces.push_back(std::move(u));
    col += kind.sizes[i];
  }
  finish(spec, ds);
  return ds;
}

LabeledDataset generate(const ModelSpec& spec) {
  return std::visit(
      [&](const auto& k) -> LabeledDataset {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Unstructured>) return gen_unstructured(spec);
        else if constexpr (std::is_same_v<K, StructuredOutliers>) return gen_structured_outliers(spec);
        else if constexpr (std::is_same_v<K, NoisyInliers>) return gen_noisy(spec);
        else if constexpr (std::is_same_v<K, AdditiveNoise>) return gen_additive_noise(spec);
        else if constexpr (std::is_same_v<K, ClusteredInliers>) return gen_clustered_inliers(spec);
        else return gen_union_subspaces(spec);
      },
      spec.kind);
}

double sigma_from_tau(double tau) { return tau * std::sqrt(std::numbers::pi / 2.0); }

double gaussian_scale_for_mean_norm(double tau, Index m) {
  const double md = static_cast<double>(m);
  const double mean_chi = std::sqrt(2.0) * std::exp(std::lgamma((md + 1.0) / 2.0) - std::lgamma(md / 2.0));
  return tau / mean_chi;
}

std::vector<int> corrupt_labels(const std::vector<int>& labels, int clusters, double fraction,
                                std::uint64_t seed) {
  if (clusters < 2) throw InvalidArgument("corrupt_labels: need at least 2 clusters");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidArgument("corrupt_labels: fraction must be in [0, 1]");
  const std::size_t n = labels.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> out = labels;
  for (std::size_t i = 0; i < count; ++i) {
    int& label = out[idx[i]];
    if (label < 1 || label > clusters) throw InvalidArgument("corrupt_labels: label outside 1..L");
    int other = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(clusters - 1)));
    if (other >= label) ++other;
    label = other;
  }
  return out;
}

}  // namespace cop
