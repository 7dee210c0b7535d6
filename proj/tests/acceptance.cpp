// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include "invariance.hpp"
#include "oracles.hpp"

#include "coherence_pursuit/cop.hpp"
#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/experiments.hpp"
#include "coherence_pursuit/metrics.hpp"
#include "coherence_pursuit/numeric.hpp"
#include "coherence_pursuit/rng.hpp"
#include "coherence_pursuit/synth.hpp"
#include "coherence_pursuit/theory.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace cop;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Verdict dominant_outliers() {
  const auto start = Clock::now();
  CopConfig cfg;
  cfg.r = 5;
  cfg.power = CoherencePower::Squared;
  const ModelSpec model{Unstructured{}, 400, 5, 50, 5000, 0, false};
  const auto errors = recovery_trials(model, cfg, 20, 1, 0);
  const double secs = since(start);
  int ok = 0;
  double worst = 0;
  for (double e : errors) {
    ok += e <= 1e-5;
    worst = std::max(worst, e);
  }
  std::ostringstream s;
  s << ok << "/20 seeds with error <= 1e-5 (max " << worst << "), " << secs << " s";
  return {ok >= 19 && secs < 30, s.str()};
}

Verdict phase_transition() {
  const auto start = Clock::now();
  PhaseTransitionConfig cfg;
  cfg.seed = 2;
  const auto res = run_phase_transition(cfg);
  const double secs = since(start);
  bool ok = true;
  double worst = 1;
  for (const auto& c : res.cells)
    if (c.n1_over_r >= 5 && c.n2_over_m <= 30) {
      worst = std::min(worst, c.success_fraction);
      ok = ok && c.success_fraction == 1.0;
    }
  double corner = -1;
  for (const auto& c : res.cells)
    if (c.n1_over_r == 1 && c.n2_over_m == 30) corner = c.success_fraction;
  std::ostringstream s;
  s << "min success over n1/r >= 5: " << worst << ", cell (1, 30): " << corner << ", " << secs
    << " s";
  return {ok && corner >= 0 && corner <= 0.2 && secs < 300, s.str()};
}

Verdict structured_outliers() {
  StructuredSweepConfig cfg;
  cfg.mus = {5.0, 0.5, 0.2, 0.1};
  cfg.seed = 3;
  const auto res = run_structured_sweep(cfg);
  bool ok = true;
  std::ostringstream s;
  for (std::size_t i = 0; i < cfg.mus.size(); ++i) {
    const Index n = res.cop_success_count(i);
    ok = ok && n >= 18;
    s << "mu=" << cfg.mus[i] << ": " << n << "/20  ";
  }
  return {ok, s.str()};
}

Verdict noise_separation() {
  NoiseSweepConfig cfg;
  cfg.taus = {0.5, 1.0};
  cfg.seed = 4;
  const auto res = run_noise_sweep(cfg);
  bool ok = true;
  std::ostringstream s;
  for (std::size_t i = 0; i < cfg.taus.size(); ++i) {
    const Index n = res.separated_count(i);
    ok = ok && n >= 18;
    s << "tau=" << cfg.taus[i] << ": " << n << "/20  ";
  }
  return {ok, s.str()};
}

Verdict expectation_oracle() {
  const Index m = 100, r = 10, n1 = 50, n2 = 100, trials = 500;
  std::vector<double> v;
  for (Index t = 0; t < trials; ++t) {
    const auto ds = generate(ModelSpec{Unstructured{}, m, r, n1, n2, Rng(5).split(t).key(), false});
    const Matrix x = normalize_columns(ds.d, ZeroColumnPolicy::Strict).x;
    const auto prof = coherence_kernel(x, CoherencePower::Squared, kDefaultBlock, 1);
    // column 0 is an inlier; one value per trial keeps the samples independent
    v.push_back(prof.values(0));
  }
  double mean = 0;
  for (double a : v) mean += a;
  mean /= static_cast<double>(trials);
  double var = 0;
  for (double a : v) var += (a - mean) * (a - mean);
  var /= static_cast<double>(trials - 1);
  const double se = std::sqrt(var / static_cast<double>(trials));
  const double expected = (n1 - 1.0) / r + static_cast<double>(n2) / m;
  std::ostringstream s;
  s << "mean " << mean << " vs " << expected << ", |diff| = " << std::abs(mean - expected) / se
    << " SE";
  return {std::abs(mean - expected) <= 3 * se, s.str()};
}

Verdict guarantee_soundness() {
  Rng rng(6);
  int points = 0;
  long attempts = 0;
  double hits = 0;
  double total = 0;
  double worst = 1;
  while (points < 50 && attempts < 200000) {
    ++attempts;
    ConditionParams p;
    p.m = 400 + static_cast<double>(rng.below(801));
    p.r = 2 + static_cast<double>(rng.below(3));
    p.n1 = 300 + static_cast<double>(rng.below(1201));
    p.n2 = 1 + static_cast<double>(rng.below(30));
    p.delta = 0.05;
    const ConditionKind kind =
        rng.below(2) ? ConditionKind::ExactRecoveryAbs : ConditionKind::ExactRecoverySquared;
    if (!check_condition(kind, p).holds) continue;
    const double freq = validate_condition_empirically(kind, p, 10, rng(), 0);
    worst = std::min(worst, freq);
    hits += 10 * freq;
    total += 10;
    ++points;
  }
  const double freq = total > 0 ? hits / total : 0;
  std::ostringstream s;
  s << points << " points (" << attempts << " draws), frequency " << freq << ", worst point "
    << worst;
  return {points == 50 && freq >= 0.85, s.str()};
}

Verdict tail_function() {
  const Index m = 100;
  const long samples = 1000000;
  Rng rng(7);
  const std::vector<double> ts{1, 4, 9};
  std::vector<long> above(ts.size(), 0);
  // by rotation invariance q can be fixed to e1
  for (long k = 0; k < samples; ++k) {
    double first = 0;
    double norm2 = 0;
    for (Index i = 0; i < m; ++i) {
      const double g = rng.normal();
      if (i == 0) first = g * g;
      norm2 += g * g;
    }
    const double c = first / norm2;
    for (std::size_t j = 0; j < ts.size(); ++j) above[j] += c > ts[j] / m;
  }
  bool ok = true;
  std::ostringstream s;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double est = static_cast<double>(above[j]) / samples;
    const double se = std::sqrt(est * (1 - est) / samples);
    const double f = tail_f(ts[j], m);
    ok = ok && std::abs(f - est) <= 3 * se;
    s << "t=" << ts[j] << ": " << f << " vs " << est << " (" << std::abs(f - est) / se << " SE)  ";
  }
  double prev = tail_f(0, m);
  const bool at_zero = prev == 1.0;
  bool monotone = true;
  for (double t = 0.05; t <= 40; t += 0.05) {
    const double f = tail_f(t, m);
    monotone = monotone && f <= prev;
    prev = f;
  }
  s << "f(0)=" << tail_f(0, m) << (monotone ? " monotone" : " NOT monotone");
  return {ok && at_zero && monotone, s.str()};
}

Verdict blocked_kernel() {
  Rng rng(8);
  double worst = 0;
  for (int c = 0; c < 100; ++c) {
    const Index m = 1 + static_cast<Index>(rng.below(60));
    const Index n = 1 + static_cast<Index>(rng.below(200));
    const Matrix x = sample_unit_sphere(m, n, rng);
    for (int p : {1, 2}) {
      const Vector ref = oracle::naive_coherence(x, p);
      for (Index block : {Index{1}, Index{7}, Index{64}, n}) {
        const auto prof = coherence_kernel(x, coherence_power_from_int(p), block, 0);
        worst = std::max(worst, (prof.values - ref).cwiseAbs().maxCoeff());
      }
    }
  }
  std::ostringstream s;
  s << "max abs difference " << worst;
  return {worst <= 1e-10, s.str()};
}

Verdict cluster_correction() {
  ClusterCorrectionConfig cfg;
  cfg.seed = 9;
  const auto res = run_cluster_correction(cfg);
  bool start_exact = true;
  for (const auto& t : res.trajectories) start_exact = start_exact && t[0] == 0.2;
  double best = 1;
  for (std::size_t i = 1; i < res.median.size(); ++i) best = std::min(best, res.median[i]);
  std::ostringstream s;
  s << "median trajectory";
  for (double v : res.median) s << ' ' << v;
  s << (start_exact ? ", iteration 0 = 0.2 in every trial" : ", iteration 0 not 0.2");
  return {start_exact && best <= 0.02, s.str()};
}

Verdict complexity() {
  BenchConfig cfg;
  cfg.sizes = {{1000, 1000}, {1000, 2000}};
  cfg.repeats = 5;
  cfg.threads = 1;
  cfg.seed = 10;
  const auto res = bench_timing(cfg);
  const double a = res.median_kernel_seconds(0);
  const double b = res.median_kernel_seconds(1);
  std::ostringstream s;
  s << "kernel " << a << " s -> " << b << " s, ratio " << b / a;
  return {b / a >= 3 && b / a <= 6, s.str()};
}

Verdict invariances() {
  int failed = 0;
  std::string first;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto out = invariance::run_case(seed);
    if (!out.ok) {
      ++failed;
      if (first.empty()) first = out.detail;
    }
  }
  std::ostringstream s;
  s << 100 - failed << "/100 cases";
  if (!first.empty()) s << "; first failure: " << first;
  return {failed == 0, s.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"dominant-outlier recovery", dominant_outliers},
      {"phase transition", phase_transition},
      {"structured outliers", structured_outliers},
      {"noise separation", noise_separation},
      {"expectation oracle", expectation_oracle},
      {"guarantee soundness", guarantee_soundness},
      {"tail function", tail_function},
      {"blocked kernel", blocked_kernel},
      {"clustering correction", cluster_correction},
      {"complexity", complexity},
      {"invariances", invariances},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
