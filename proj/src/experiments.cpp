#include "coherence_pursuit/experiments.hpp"

#include "coherence_pursuit/clustering.hpp"
#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/metrics.hpp"
#include "coherence_pursuit/numeric.hpp"
#include "coherence_pursuit/parallel.hpp"
#include "coherence_pursuit/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace cop {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void schema_line(std::ostream& out, const char* table) {
  out << "# coherence-pursuit " << table << " v" << kCsvSchemaVersion << '\n';
}

void require_trials(Index trials, const char* what) {
  if (trials < 1) throw InvalidArgument(std::string(what) + ": trials must be >= 1");
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t cell, Index trial) {
  return Rng(seed).split(cell).split(static_cast<std::uint64_t>(trial)).key();
}

// (min inlier - max outlier) / max over all columns.
double separation_gap(const CoherenceProfile& prof, const std::vector<int>& labels) {
  double in_min = std::numeric_limits<double>::infinity();
  double out_max = -std::numeric_limits<double>::infinity();
  double all_max = 0;
  for (Index j = 0; j < prof.size(); ++j) {
    const double v = prof.values(j);
    all_max = std::max(all_max, v);
    if (labels[static_cast<std::size_t>(j)] == kInlierLabel)
      in_min = std::min(in_min, v);
    else
      out_max = std::max(out_max, v);
  }
  if (all_max <= 0) return 0;
  return (in_min - out_max) / all_max;
}

// Rethrows numerical failures with the failing cell attached.
template <class Fn>
void in_cell(const std::string& cell, Fn&& fn) {
  try {
    fn();
  } catch (const NumericalError& e) {
    throw NumericalError(cell + ": " + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median: empty input");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> recovery_trials(const ModelSpec& model, const CopConfig& cfg, Index trials,
                                    std::uint64_t seed, unsigned threads) {
  require_trials(trials, "recovery_trials");
  model.validate();
  cfg.validate();
  std::vector<double> errors(static_cast<std::size_t>(trials));
  const Rng base(seed);
  parallel_for(errors.size(), threads, [&](std::size_t t) {
    ModelSpec spec = model;
    spec.seed = base.split(t).key();
    const LabeledDataset ds = generate(spec);
    CopConfig c = cfg;
    c.threads = 1;
    in_cell("trial " + std::to_string(t), [&] {
      errors[t] = recovery_error(ds.subspace(), cop(ds.d, c).basis);
    });
  });
  return errors;
}

// ---------------------------------------------------------------------------
// Phase transition

void PhaseTransitionConfig::validate() const {
  if (m < 1 || r < 1 || r > m) throw InvalidArgument("phase: need 1 <= r <= m");
  if (n1_over_r.empty() || n2_over_m.empty()) throw InvalidArgument("phase: empty grid axis");
  for (double v : n1_over_r)
    if (!(v > 0)) throw InvalidArgument("phase: n1/r values must be positive");
  for (double v : n2_over_m)
    if (!(v >= 0)) throw InvalidArgument("phase: n2/m values must be non-negative");
  require_trials(trials, "phase");
  if (sample_count < r) throw InvalidArgument("phase: sample count must be >= r");
  if (!(threshold > 0)) throw InvalidArgument("phase: threshold must be positive");
  if (cell_pixels < 1) throw InvalidArgument("phase: cell_pixels must be >= 1");
}

const PhaseCell& PhaseTransitionResult::cell(std::size_t n2_index, std::size_t n1_index) const {
  return cells.at(n2_index * config.n1_over_r.size() + n1_index);
}

GrayImage PhaseTransitionResult::heatmap() const {
  const int cols = static_cast<int>(config.n1_over_r.size());
  const int rows = static_cast<int>(config.n2_over_m.size());
  const int px = config.cell_pixels;
  GrayImage img;
  img.width = cols * px;
  img.height = rows * px;
  img.maxval = 255;
  img.pixels.assign(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height), 0);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double frac = cell(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).success_fraction;
      const auto v = static_cast<std::uint16_t>(std::lround(255.0 * frac));
      const int top = (rows - 1 - i) * px;
      for (int y = 0; y < px; ++y)
        for (int x = 0; x < px; ++x) img.at(top + y, j * px + x) = v;
    }
  }
  return img;
}

void PhaseTransitionResult::write_csv(std::ostream& out) const {
  schema_line(out, "phase");
  out << "n1_over_r,n2_over_m,n1,n2,trial,recovery_error,log10_error,success,seconds\n";
  for (const auto& c : cells) {
    for (std::size_t t = 0; t < c.errors.size(); ++t) {
      const double e = c.errors[t];
      out << fmt(c.n1_over_r) << ',' << fmt(c.n2_over_m) << ',' << c.n1 << ',' << c.n2 << ','
          << t << ',' << fmt(e) << ',' << fmt(std::log10(std::max(e, 1e-300))) << ','
          << (e <= config.threshold ? 1 : 0) << ',' << fmt(c.seconds[t]) << '\n';
    }
  }
}

PhaseTransitionResult run_phase_transition(const PhaseTransitionConfig& cfg) {
  cfg.validate();
  PhaseTransitionResult res;
  res.config = cfg;
  for (double b : cfg.n2_over_m) {
    for (double a : cfg.n1_over_r) {
      PhaseCell c;
      c.n1_over_r = a;
      c.n2_over_m = b;
      c.n1 = static_cast<Index>(std::llround(a * static_cast<double>(cfg.r)));
      c.n2 = static_cast<Index>(std::llround(b * static_cast<double>(cfg.m)));
      if (c.n1 < cfg.r) throw InvalidArgument("phase: n1 must be >= r in every cell");
      c.errors.resize(static_cast<std::size_t>(cfg.trials));
      c.seconds.resize(static_cast<std::size_t>(cfg.trials));
      res.cells.push_back(std::move(c));
    }
  }
  const auto trials = static_cast<std::size_t>(cfg.trials);
  parallel_for(res.cells.size() * trials, cfg.threads, [&](std::size_t job) {
    const std::size_t ci = job / trials;
    const std::size_t t = job % trials;
    PhaseCell& c = res.cells[ci];
    ModelSpec spec;
    spec.m = cfg.m;
    spec.r = cfg.r;
    spec.n1 = c.n1;
    spec.n2 = c.n2;
    spec.seed = trial_seed(cfg.seed, ci, static_cast<Index>(t));
    CopConfig cc;
    cc.r = cfg.r;
    cc.power = CoherencePower::Squared;
    cc.strategy = FixedCount{cfg.sample_count};
    cc.threads = 1;
    in_cell("phase cell n1/r=" + fmt(c.n1_over_r) + " n2/m=" + fmt(c.n2_over_m) + " trial " +
                std::to_string(t),
            [&] {
              const auto start = Clock::now();
              const LabeledDataset ds = generate(spec);
              c.errors[t] = recovery_error(ds.subspace(), cop(ds.d, cc).basis);
              c.seconds[t] = seconds_since(start);
            });
  });
  for (auto& c : res.cells) {
    const auto ok = std::count_if(c.errors.begin(), c.errors.end(),
                                  [&](double e) { return e <= cfg.threshold; });
    c.success_fraction = static_cast<double>(ok) / static_cast<double>(cfg.trials);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Noise sweep

void NoiseSweepConfig::validate() const {
  ModelSpec{AdditiveNoise{0.0}, m, r, n1, n2, 0, false}.validate();
  if (taus.empty()) throw InvalidArgument("noise-sweep: no tau values");
  for (double t : taus)
    if (!(t >= 0)) throw InvalidArgument("noise-sweep: tau must be >= 0");
  require_trials(trials, "noise-sweep");
  if (n1 < 1 || n2 < 1) throw InvalidArgument("noise-sweep: need inliers and outliers");
}

Index NoiseSweepResult::separated_count(std::size_t tau_index) const {
  Index count = 0;
  for (const auto& row : rows)
    if (row.tau == config.taus.at(tau_index) && row.gap_p2 > 0) ++count;
  return count;
}

void NoiseSweepResult::write_csv(std::ostream& out) const {
  schema_line(out, "noise-sweep");
  out << "tau,trial,gap_p1,gap_p2\n";
  for (const auto& row : rows)
    out << fmt(row.tau) << ',' << row.trial << ',' << fmt(row.gap_p1) << ',' << fmt(row.gap_p2)
        << '\n';
}

NoiseSweepResult run_noise_sweep(const NoiseSweepConfig& cfg) {
  cfg.validate();
  NoiseSweepResult res;
  res.config = cfg;
  const auto trials = static_cast<std::size_t>(cfg.trials);
  res.rows.resize(cfg.taus.size() * trials);
  parallel_for(res.rows.size(), cfg.threads, [&](std::size_t job) {
    const std::size_t ti = job / trials;
    const std::size_t t = job % trials;
    ModelSpec spec{AdditiveNoise{cfg.taus[ti]}, cfg.m, cfg.r, cfg.n1, cfg.n2,
                   trial_seed(cfg.seed, ti, static_cast<Index>(t)), false};
    const LabeledDataset ds = generate(spec);
    NoiseTrial& row = res.rows[job];
    row.tau = cfg.taus[ti];
    row.trial = static_cast<Index>(t);
    in_cell("noise-sweep tau=" + fmt(row.tau) + " trial " + std::to_string(t), [&] {
      const Matrix x = normalize_columns(ds.d, ZeroColumnPolicy::Strict).x;
      row.gap_p1 = separation_gap(coherence_kernel(x, CoherencePower::Abs, kDefaultBlock, 1), ds.labels);
      row.gap_p2 =
          separation_gap(coherence_kernel(x, CoherencePower::Squared, kDefaultBlock, 1), ds.labels);
    });
  });
  return res;
}

// ---------------------------------------------------------------------------
// Structured outliers sweep

void StructuredSweepConfig::validate() const {
  ModelSpec{StructuredOutliers{1.0, nu}, m, r, n1, n2, 0, false}.validate();
  if (mus.empty()) throw InvalidArgument("structured-sweep: no mu values");
  for (double mu : mus)
    if (!(mu > 0)) throw InvalidArgument("structured-sweep: mu must be positive");
  require_trials(trials, "structured-sweep");
  if (n1 < 1 || n2 < 1) throw InvalidArgument("structured-sweep: need inliers and outliers");
}

Index StructuredSweepResult::cop_success_count(std::size_t mu_index, double threshold) const {
  Index count = 0;
  for (const auto& row : rows)
    if (row.mu == config.mus.at(mu_index) && row.cop_error <= threshold) ++count;
  return count;
}

void StructuredSweepResult::write_csv(std::ostream& out) const {
  schema_line(out, "structured-sweep");
  out << "mu,trial,cop_error,spca_error,gap_p2\n";
  for (const auto& row : rows)
    out << fmt(row.mu) << ',' << row.trial << ',' << fmt(row.cop_error) << ','
        << fmt(row.spca_error) << ',' << fmt(row.gap_p2) << '\n';
}

StructuredSweepResult run_structured_sweep(const StructuredSweepConfig& cfg) {
  cfg.validate();
  StructuredSweepResult res;
  res.config = cfg;
  const auto trials = static_cast<std::size_t>(cfg.trials);
  res.rows.resize(cfg.mus.size() * trials);
  parallel_for(res.rows.size(), cfg.threads, [&](std::size_t job) {
    const std::size_t mi = job / trials;
    const std::size_t t = job % trials;
    ModelSpec spec{StructuredOutliers{cfg.mus[mi], cfg.nu}, cfg.m, cfg.r, cfg.n1, cfg.n2,
                   trial_seed(cfg.seed, mi, static_cast<Index>(t)), false};
    const LabeledDataset ds = generate(spec);
    StructuredTrial& row = res.rows[job];
    row.mu = cfg.mus[mi];
    row.trial = static_cast<Index>(t);
    in_cell("structured-sweep mu=" + fmt(row.mu) + " trial " + std::to_string(t), [&] {
      CopConfig cc;
      cc.r = cfg.r;
      cc.power = CoherencePower::Squared;
      cc.threads = 1;
      const CopResult cr = cop(ds.d, cc);
      row.cop_error = recovery_error(ds.subspace(), cr.basis);
      row.spca_error = recovery_error(ds.subspace(), spca(ds.d, cfg.r));
      row.gap_p2 = separation_gap(cr.profile, ds.labels);
    });
  });
  return res;
}

// ---------------------------------------------------------------------------
// Clustering correction

void ClusterCorrectionConfig::validate() const {
  ModelSpec{UnionOfSubspaces{dims, sizes}, m, 1, 0, 0, 0, false}.validate();
  if (dims.size() < 2 || dims.size() > 8)
    throw InvalidArgument("cluster-correct: need 2..8 clusters");
  if (!(corruption >= 0 && corruption < 1))
    throw InvalidArgument("cluster-correct: corruption must be in [0, 1)");
  if (iterations < 1) throw InvalidArgument("cluster-correct: iterations must be >= 1");
  require_trials(trials, "cluster-correct");
}

void ClusterCorrectionResult::write_csv(std::ostream& out) const {
  schema_line(out, "cluster-correct");
  out << "trial,iteration,error\n";
  for (std::size_t s = 0; s < trajectories.size(); ++s)
    for (std::size_t i = 0; i < trajectories[s].size(); ++i)
      out << s << ',' << i << ',' << fmt(trajectories[s][i]) << '\n';
  for (std::size_t i = 0; i < median.size(); ++i)
    out << "median," << i << ',' << fmt(median[i]) << '\n';
}

ClusterCorrectionResult run_cluster_correction(const ClusterCorrectionConfig& cfg) {
  cfg.validate();
  ClusterCorrectionResult res;
  res.config = cfg;
  const auto trials = static_cast<std::size_t>(cfg.trials);
  const auto steps = static_cast<std::size_t>(cfg.iterations) + 1;
  res.trajectories.assign(trials, std::vector<double>(steps, 0.0));
  std::vector<char> fixed(trials, 0);
  const int L = static_cast<int>(cfg.dims.size());
  parallel_for(trials, cfg.threads, [&](std::size_t t) {
    const Rng base = Rng(cfg.seed).split(t);
    ModelSpec spec{UnionOfSubspaces{cfg.dims, cfg.sizes}, cfg.m, 1, 0, 0, base.split(0).key(), false};
    const LabeledDataset ds = generate(spec);
    const Clustering truth{ds.labels, L};
    const Clustering initial{corrupt_labels(ds.labels, L, cfg.corruption, base.split(1).key()), L};
    CopConfig cc = default_correction_config();
    cc.threads = 1;
    in_cell("cluster-correct trial " + std::to_string(t), [&] {
      const CorrectionResult cr =
          correct_clustering(ds.d, initial, cfg.dims, cfg.iterations, cc, &truth);
      auto& traj = res.trajectories[t];
      for (std::size_t i = 0; i < steps; ++i)
        traj[i] = cr.error_trajectory[std::min(i, cr.error_trajectory.size() - 1)];
      fixed[t] = cr.stopped_at_fixed_point ? 1 : 0;
    });
  });
  res.fixed_point.assign(fixed.begin(), fixed.end());
  for (std::size_t i = 0; i < steps; ++i) {
    std::vector<double> col;
    for (const auto& traj : res.trajectories) col.push_back(traj[i]);
    res.median.push_back(median(std::move(col)));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Timing

void BenchConfig::validate() const {
  if (sizes.empty()) throw InvalidArgument("bench: no sizes");
  for (const auto& [m, n] : sizes) {
    if (m < r || n < 5) throw InvalidArgument("bench: need m >= r and n >= 5");
    if (n / 5 < r) throw InvalidArgument("bench: n/5 must be >= r");
  }
  if (r < 1) throw InvalidArgument("bench: r must be >= 1");
  require_trials(repeats, "bench");
}

double BenchResult::median_kernel_seconds(std::size_t size_index) const {
  const auto [m, n] = config.sizes.at(size_index);
  std::vector<double> v;
  for (const auto& row : rows)
    if (row.m == m && row.n == n) v.push_back(row.kernel_seconds);
  return median(std::move(v));
}

void BenchResult::write_csv(std::ostream& out) const {
  schema_line(out, "bench");
  out << "m,n,n1,n2,repeat,recovery_error,kernel_seconds,subspace_seconds,total_seconds\n";
  for (const auto& row : rows)
    out << row.m << ',' << row.n << ',' << row.n1 << ',' << row.n2 << ',' << row.repeat << ','
        << fmt(row.recovery_error) << ',' << fmt(row.kernel_seconds) << ','
        << fmt(row.subspace_seconds) << ',' << fmt(row.total_seconds) << '\n';
}

BenchResult bench_timing(const BenchConfig& cfg) {
  cfg.validate();
  BenchResult res;
  res.config = cfg;
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    const auto [m, n] = cfg.sizes[si];
    for (Index rep = 0; rep < cfg.repeats; ++rep) {
      BenchRow row;
      row.m = m;
      row.n = n;
      row.n1 = n / 5;
      row.n2 = n - row.n1;
      row.repeat = rep;
      const LabeledDataset ds =
          generate(ModelSpec{Unstructured{}, m, cfg.r, row.n1, row.n2, trial_seed(cfg.seed, si, rep), false});
      in_cell("bench m=" + std::to_string(m) + " n=" + std::to_string(n), [&] {
        const auto t0 = Clock::now();
        const NormalizedColumns cols = normalize_columns(ds.d, ZeroColumnPolicy::Lenient);
        const auto t1 = Clock::now();
        const CoherenceProfile prof =
            coherence_kernel(cols.x, CoherencePower::Squared, kDefaultBlock, cfg.threads);
        const auto t2 = Clock::now();
        const auto picked = greedy_rank_sampling(cols.x, prof, cfg.r);
        Matrix y(cols.x.rows(), static_cast<Index>(picked.size()));
        for (std::size_t j = 0; j < picked.size(); ++j) y.col(static_cast<Index>(j)) = cols.x.col(picked[j]);
        const SubspaceBasis basis = orthonormal_basis(y);
        const auto t3 = Clock::now();
        row.kernel_seconds = std::chrono::duration<double>(t2 - t1).count();
        row.subspace_seconds = std::chrono::duration<double>(t3 - t2).count();
        row.total_seconds = std::chrono::duration<double>(t3 - t0).count();
        row.recovery_error = recovery_error(ds.subspace(), basis);
      });
      res.rows.push_back(row);
    }
  }
  return res;
}

}  // namespace cop
