#pragma once

#include "coherence_pursuit/cop.hpp"
#include "coherence_pursuit/pgm.hpp"
#include "coherence_pursuit/synth.hpp"
#include "coherence_pursuit/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cop {

/// Every CSV starts with a "# coherence-pursuit <table> v<N>" line followed by
/// a header row. Rows are emitted in grid order, never completion order.
inline constexpr int kCsvSchemaVersion = 1;

/// Recovery errors of `cfg` on `trials` independent draws of `model`; trial i
/// uses seed Rng(seed).split(i).key(). model.seed is ignored.
std::vector<double> recovery_trials(const ModelSpec& model, const CopConfig& cfg, Index trials,
                                    std::uint64_t seed, unsigned threads = 0);

struct PhaseTransitionConfig {
  Index m = 100;
  Index r = 10;
  std::vector<double> n1_over_r{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> n2_over_m{0, 5, 10, 20, 30};
  Index trials = 10;
  Index sample_count = 20;
  double threshold = 1e-5;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  int cell_pixels = 8;

  void validate() const;
};

struct PhaseCell {
  double n1_over_r = 0;
  double n2_over_m = 0;
  Index n1 = 0;
  Index n2 = 0;
  std::vector<double> errors;
  std::vector<double> seconds;
  double success_fraction = 0;
};

struct PhaseTransitionResult {
  PhaseTransitionConfig config;
  /// Row-major: cells[i * n1_over_r.size() + j] is (n2_over_m[i], n1_over_r[j]).
  std::vector<PhaseCell> cells;

  const PhaseCell& cell(std::size_t n2_index, std::size_t n1_index) const;
  /// 255 = every trial succeeded, 0 = none. n1/r grows to the right, n2/m
  /// grows upward.
  GrayImage heatmap() const;
  /// Columns: n1_over_r,n2_over_m,n1,n2,trial,recovery_error,log10_error,success,seconds
  void write_csv(std::ostream& out) const;
};

PhaseTransitionResult run_phase_transition(const PhaseTransitionConfig& cfg);

struct NoiseSweepConfig {
  Index m = 400;
  Index r = 5;
  Index n1 = 50;
  Index n2 = 500;
  std::vector<double> taus{0.0, 0.5, 1.0, 2.0, 10.0};
  Index trials = 20;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  void validate() const;
};

struct NoiseTrial {
  double tau = 0;
  Index trial = 0;
  double gap_p1 = 0;  ///< (min inlier - max outlier) / max, p = 1
  double gap_p2 = 0;  ///< same for p = 2
};

struct NoiseSweepResult {
  NoiseSweepConfig config;
  std::vector<NoiseTrial> rows;  ///< tau-major, then trial

  /// Number of trials at taus[i] with a positive p=2 gap.
  Index separated_count(std::size_t tau_index) const;
  /// Columns: tau,trial,gap_p1,gap_p2
  void write_csv(std::ostream& out) const;
};

NoiseSweepResult run_noise_sweep(const NoiseSweepConfig& cfg);

struct StructuredSweepConfig {
  Index m = 200;
  Index r = 5;
  Index n1 = 400;
  double nu = 0.2;
  Index n2 = 20;
  std::vector<double> mus{5.0, 1.0, 0.5, 0.2, 0.1, 0.05};
  Index trials = 20;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  void validate() const;
};

struct StructuredTrial {
  double mu = 0;
  Index trial = 0;
  double cop_error = 0;
  double spca_error = 0;
  double gap_p2 = 0;
};

struct StructuredSweepResult {
  StructuredSweepConfig config;
  std::vector<StructuredTrial> rows;  ///< mu-major, then trial

  Index cop_success_count(std::size_t mu_index, double threshold = 1e-5) const;
  /// Columns: mu,trial,cop_error,spca_error,gap_p2
  void write_csv(std::ostream& out) const;
};

StructuredSweepResult run_structured_sweep(const StructuredSweepConfig& cfg);

struct ClusterCorrectionConfig {
  Index m = 50;
  std::vector<Index> dims{3, 3};
  std::vector<Index> sizes{250, 250};
  double corruption = 0.2;
  int iterations = 4;
  Index trials = 20;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  void validate() const;
};

struct ClusterCorrectionResult {
  ClusterCorrectionConfig config;
  /// trajectories[s][i] = clustering error of trial s after i iterations.
  /// Trials that reach a fixed point early repeat their last value.
  std::vector<std::vector<double>> trajectories;
  std::vector<bool> fixed_point;
  std::vector<double> median;

  /// Columns: trial,iteration,error (trial = "median" for the median curve)
  void write_csv(std::ostream& out) const;
};

ClusterCorrectionResult run_cluster_correction(const ClusterCorrectionConfig& cfg);

struct BenchConfig {
  /// (m, n) pairs; n1 = n/5, n2 = n - n1.
  std::vector<std::pair<Index, Index>> sizes{{1000, 1000}, {2000, 2000}};
  Index r = 10;
  Index repeats = 5;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  void validate() const;
};

struct BenchRow {
  Index m = 0;
  Index n = 0;
  Index n1 = 0;
  Index n2 = 0;
  Index repeat = 0;
  double recovery_error = 0;
  double kernel_seconds = 0;
  double subspace_seconds = 0;
  double total_seconds = 0;
};

struct BenchResult {
  BenchConfig config;
  std::vector<BenchRow> rows;  ///< size-major, then repeat

  /// Median kernel seconds over the repeats of sizes[i].
  double median_kernel_seconds(std::size_t size_index) const;
  /// Columns: m,n,n1,n2,repeat,recovery_error,kernel_seconds,subspace_seconds,total_seconds
  void write_csv(std::ostream& out) const;
};

/// Timed runs run sequentially; `threads` is passed to the coherence kernel.
BenchResult bench_timing(const BenchConfig& cfg);

double median(std::vector<double> values);

}  // namespace cop
