// coherence-pursuit command-line harness.
//
// Every subcommand accepts --config FILE, a flat key=value file whose keys are
// the long option names of that subcommand (without the dashes). Lists are
// comma-separated. Options given on the command line override the file.
#include "CLI11.hpp"

#include "coherence_pursuit/clustering.hpp"
#include "coherence_pursuit/cop.hpp"
#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/experiments.hpp"
#include "coherence_pursuit/matrix_io.hpp"
#include "coherence_pursuit/pgm.hpp"
#include "coherence_pursuit/saliency.hpp"
#include "coherence_pursuit/synth.hpp"
#include "coherence_pursuit/theory.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace cop;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

// Splices the key=value pairs of every "--config FILE" right after the
// subcommand name, so later command-line flags take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> rest;
  std::optional<std::string> file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!file) return args;
  std::vector<std::string> injected;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(*file);
  } catch (const CLI::FileError&) {
    throw IoError("cannot read config file " + *file);
  }
  for (const auto& item : items) {
    if (item.name.empty() || item.name == "++" || item.name == "--") continue;
    std::string value;
    for (std::size_t k = 0; k < item.inputs.size(); ++k) value += (k ? "," : "") + item.inputs[k];
    injected.push_back("--" + item.name + "=" + value);
  }
  // rest[0] is the program name, rest[1] the subcommand
  for (std::size_t i = 0; i < rest.size(); ++i) {
    out.push_back(rest[i]);
    if (i == 1) out.insert(out.end(), injected.begin(), injected.end());
  }
  if (rest.size() < 2) out.insert(out.end(), injected.begin(), injected.end());
  return out;
}

// "-" or empty means stdout.
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  fn(out);
  if (!out) throw IoError("write to " + path + " failed");
}

CoherencePower power_of(int p) { return coherence_power_from_int(p); }

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string model = "unstructured";
  Index m = 100, r = 5, n1 = 50, n2 = 50;
  double mu = 1.0, nu = 0.5, sigma = 0.1, tau = 0.5;
  std::optional<double> inlier_nu;
  std::vector<Index> dims{3, 3}, sizes{100, 100};
  std::uint64_t seed = 0;
  bool shuffle = false;
  std::string out = "-", labels, basis;
};

void add_gen(CLI::App& app, GenArgs& a) {
  auto* c = app.add_subcommand("gen", "Generate a synthetic data matrix and labels");
  c->add_option("--model", a.model, "unstructured|structured|noisy|additive|clustered|union")
      ->check(CLI::IsMember({"unstructured", "structured", "noisy", "additive", "clustered", "union"}));
  c->add_option("--m", a.m, "ambient dimension");
  c->add_option("--r", a.r, "subspace rank");
  c->add_option("--n1", a.n1, "inliers");
  c->add_option("--n2", a.n2, "outliers");
  c->add_option("--mu", a.mu, "outlier spread (structured)");
  c->add_option("--inlier-nu", a.inlier_nu, "inlier spread for structured data");
  c->add_option("--nu", a.nu, "inlier spread (clustered)");
  c->add_option("--sigma", a.sigma, "inlier noise level (noisy)");
  c->add_option("--tau", a.tau, "additive noise level (additive)");
  c->add_option("--dims", a.dims, "subspace dimensions (union)")->delimiter(',');
  c->add_option("--sizes", a.sizes, "points per subspace (union)")->delimiter(',');
  c->add_option("--seed", a.seed);
  c->add_flag("--shuffle", a.shuffle, "randomly permute the columns");
  c->add_option("--out", a.out, "matrix output (default stdout)");
  c->add_option("--labels", a.labels, "label output");
  c->add_option("--basis", a.basis, "true basis output (first subspace)");
}

int run_gen(const GenArgs& a) {
  ModelSpec spec;
  spec.m = a.m;
  spec.r = a.r;
  spec.n1 = a.n1;
  spec.n2 = a.n2;
  spec.seed = a.seed;
  spec.shuffle = a.shuffle;
  if (a.model == "structured") spec.kind = StructuredOutliers{a.mu, a.inlier_nu};
  else if (a.model == "noisy") spec.kind = NoisyInliers{a.sigma};
  else if (a.model == "additive") spec.kind = AdditiveNoise{a.tau};
  else if (a.model == "clustered") spec.kind = ClusteredInliers{a.nu};
  else if (a.model == "union") spec.kind = UnionOfSubspaces{a.dims, a.sizes};
  const LabeledDataset ds = generate(spec);
  with_output(a.out, [&](std::ostream& o) { write_matrix(o, ds.d); });
  if (!a.labels.empty()) write_labels(std::filesystem::path(a.labels), ds.labels);
  if (!a.basis.empty()) write_matrix(std::filesystem::path(a.basis), ds.subspace().columns());
  return 0;
}

// ---------------------------------------------------------------------------

struct CopArgs {
  std::string input, basis_out = "-", indices_out, profile_out;
  Index r = 1;
  int p = 2;
  std::string strategy = "greedy";
  double q = 0.5;
  Index count = 20;
  Index k = 2;
  std::optional<double> upsilon;
  bool noisy = false;
  Index passes = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  bool strict = false;
};

void add_cop(CLI::App& app, CopArgs& a) {
  auto* c = app.add_subcommand("cop", "Recover a subspace from a data matrix");
  c->add_option("--input", a.input, "matrix file")->required();
  c->add_option("--r", a.r, "subspace rank")->required();
  c->add_option("--p", a.p, "coherence exponent (1 or 2)");
  c->add_option("--strategy", a.strategy, "greedy|top-fraction|fixed-count|adaptive")
      ->check(CLI::IsMember({"greedy", "top-fraction", "fixed-count", "adaptive"}));
  c->add_option("--q", a.q, "fraction dropped by top-fraction");
  c->add_option("--count", a.count, "columns kept by fixed-count");
  c->add_option("--k", a.k, "adaptive projection factor");
  c->add_option("--upsilon", a.upsilon, "adaptive norm threshold");
  c->add_flag("--noisy", a.noisy, "adaptive: noisy-data threshold");
  c->add_option("--passes", a.passes, "adaptive sampling passes");
  c->add_option("--seed", a.seed);
  c->add_option("--threads", a.threads, "0 = hardware concurrency");
  c->add_flag("--strict", a.strict, "reject zero columns instead of dropping them");
  c->add_option("--basis-out", a.basis_out, "basis output (default stdout)");
  c->add_option("--indices-out", a.indices_out, "sampled column indices output");
  c->add_option("--profile-out", a.profile_out, "coherence values output (one per line)");
}

int run_cop(const CopArgs& a) {
  const Matrix d = read_matrix(std::filesystem::path(a.input));
  CopConfig cfg;
  cfg.r = a.r;
  cfg.power = power_of(a.p);
  cfg.passes = a.passes;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.zero_columns = a.strict ? ZeroColumnPolicy::Strict : ZeroColumnPolicy::Lenient;
  if (a.strategy == "top-fraction") cfg.strategy = TopFraction{a.q};
  else if (a.strategy == "fixed-count") cfg.strategy = FixedCount{a.count};
  else if (a.strategy == "adaptive") cfg.strategy = Adaptive{a.k, a.upsilon, a.noisy};
  const CopResult res = cop::cop(d, cfg);
  with_output(a.basis_out, [&](std::ostream& o) { write_matrix(o, res.basis.columns()); });
  if (!a.indices_out.empty())
    with_output(a.indices_out, [&](std::ostream& o) { write_index_line(o, res.sampled_indices); });
  if (!a.profile_out.empty())
    with_output(a.profile_out, [&](std::ostream& o) {
      o.precision(17);
      for (Index j = 0; j < res.profile.size(); ++j) o << res.profile.values(j) << '\n';
    });
  if (res.basis.non_unique()) std::cerr << "warning: r-th singular value is repeated; basis not unique\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct PhaseArgs {
  PhaseTransitionConfig cfg;
  std::string csv = "-", pgm;
};

void add_phase(CLI::App& app, PhaseArgs& a) {
  auto* c = app.add_subcommand("phase", "Phase transition over the (n1/r, n2/m) grid");
  c->add_option("--m", a.cfg.m);
  c->add_option("--r", a.cfg.r);
  c->add_option("--n1-over-r", a.cfg.n1_over_r)->delimiter(',');
  c->add_option("--n2-over-m", a.cfg.n2_over_m)->delimiter(',');
  c->add_option("--trials", a.cfg.trials);
  c->add_option("--sample-count", a.cfg.sample_count, "columns used to build Y");
  c->add_option("--threshold", a.cfg.threshold, "success threshold on recovery error");
  c->add_option("--cell-pixels", a.cfg.cell_pixels, "heatmap pixels per cell");
  c->add_option("--seed", a.cfg.seed);
  c->add_option("--threads", a.cfg.threads);
  c->add_option("--csv", a.csv, "CSV output (default stdout)");
  c->add_option("--pgm", a.pgm, "heatmap output");
}

int run_phase(const PhaseArgs& a) {
  const auto res = run_phase_transition(a.cfg);
  with_output(a.csv, [&](std::ostream& o) { res.write_csv(o); });
  if (!a.pgm.empty()) write_pgm(std::filesystem::path(a.pgm), res.heatmap());
  return 0;
}

// ---------------------------------------------------------------------------

struct NoiseArgs {
  NoiseSweepConfig cfg;
  std::string csv = "-";
};

void add_noise(CLI::App& app, NoiseArgs& a) {
  auto* c = app.add_subcommand("noise-sweep", "Coherence gap under additive noise");
  c->add_option("--m", a.cfg.m);
  c->add_option("--r", a.cfg.r);
  c->add_option("--n1", a.cfg.n1);
  c->add_option("--n2", a.cfg.n2);
  c->add_option("--taus", a.cfg.taus)->delimiter(',');
  c->add_option("--trials", a.cfg.trials);
  c->add_option("--seed", a.cfg.seed);
  c->add_option("--threads", a.cfg.threads);
  c->add_option("--csv", a.csv, "CSV output (default stdout)");
}

// ---------------------------------------------------------------------------

struct StructuredArgs {
  StructuredSweepConfig cfg;
  std::string csv = "-";
};

void add_structured(CLI::App& app, StructuredArgs& a) {
  auto* c = app.add_subcommand("structured-sweep", "CoP and SPCA under clustered outliers");
  c->add_option("--m", a.cfg.m);
  c->add_option("--r", a.cfg.r);
  c->add_option("--n1", a.cfg.n1);
  c->add_option("--nu", a.cfg.nu, "inlier spread");
  c->add_option("--n2", a.cfg.n2);
  c->add_option("--mus", a.cfg.mus, "outlier spreads")->delimiter(',');
  c->add_option("--trials", a.cfg.trials);
  c->add_option("--seed", a.cfg.seed);
  c->add_option("--threads", a.cfg.threads);
  c->add_option("--csv", a.csv, "CSV output (default stdout)");
}

// ---------------------------------------------------------------------------

struct ClusterArgs {
  ClusterCorrectionConfig cfg;
  std::string csv = "-";
};

void add_cluster(CLI::App& app, ClusterArgs& a) {
  auto* c = app.add_subcommand("cluster-correct", "Iterative clustering correction");
  c->add_option("--m", a.cfg.m);
  c->add_option("--dims", a.cfg.dims)->delimiter(',');
  c->add_option("--sizes", a.cfg.sizes)->delimiter(',');
  c->add_option("--corruption", a.cfg.corruption, "fraction of corrupted labels");
  c->add_option("--iterations", a.cfg.iterations);
  c->add_option("--trials", a.cfg.trials);
  c->add_option("--seed", a.cfg.seed);
  c->add_option("--threads", a.cfg.threads);
  c->add_option("--csv", a.csv, "CSV output (default stdout)");
}

// ---------------------------------------------------------------------------

struct SaliencyArgs {
  SaliencyConfig cfg;
  int p = 2;
  std::string input, out, patch_out;
};

void add_saliency(CLI::App& app, SaliencyArgs& a) {
  auto* c = app.add_subcommand("saliency", "Patch saliency map of a PGM image");
  c->add_option("--input", a.input, "PGM image (P2 or P5)")->required();
  c->add_option("--patch", a.cfg.patch, "patch side in pixels");
  c->add_option("--r", a.cfg.r, "background rank");
  c->add_option("--q", a.cfg.q, "fraction of patches dropped before the background fit");
  c->add_option("--p", a.p, "coherence exponent (1 or 2)");
  c->add_option("--threads", a.cfg.threads);
  c->add_option("--out", a.out, "saliency image at input size")->required();
  c->add_option("--patch-out", a.patch_out, "saliency image, one pixel per patch");
}

int run_saliency_cmd(SaliencyArgs a) {
  a.cfg.power = power_of(a.p);
  const auto res = saliency(read_pgm(std::filesystem::path(a.input)), a.cfg);
  if (res.cropped)
    std::cerr << "note: cropped to " << res.cropped_width << "x" << res.cropped_height << "\n";
  write_pgm(std::filesystem::path(a.out), res.full_image);
  if (!a.patch_out.empty()) write_pgm(std::filesystem::path(a.patch_out), res.patch_image);
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  BenchConfig cfg;
  std::vector<std::string> sizes{"1000x1000", "2000x2000"};
  std::string csv = "-";
};

void add_bench(CLI::App& app, BenchArgs& a) {
  auto* c = app.add_subcommand("bench", "Timing of the CoP pipeline");
  c->add_option("--sizes", a.sizes, "list of MxN sizes")->delimiter(',');
  c->add_option("--r", a.cfg.r);
  c->add_option("--repeats", a.cfg.repeats);
  c->add_option("--seed", a.cfg.seed);
  c->add_option("--threads", a.cfg.threads, "threads for the coherence kernel");
  c->add_option("--csv", a.csv, "CSV output (default stdout)");
}

int run_bench(BenchArgs a) {
  a.cfg.sizes.clear();
  for (const auto& s : a.sizes) {
    const auto x = s.find('x');
    if (x == std::string::npos) throw InvalidArgument("bench: size '" + s + "' is not MxN");
    try {
      a.cfg.sizes.emplace_back(std::stol(s.substr(0, x)), std::stol(s.substr(x + 1)));
    } catch (const std::logic_error&) {
      throw InvalidArgument("bench: size '" + s + "' is not MxN");
    }
  }
  const auto res = bench_timing(a.cfg);
  with_output(a.csv, [&](std::ostream& o) { res.write_csv(o); });
  return 0;
}

// ---------------------------------------------------------------------------

struct ConditionArgs {
  std::string kind;
  ConditionParams params;
  Index trials = 0;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

void add_condition(CLI::App& app, ConditionArgs& a) {
  auto* c = app.add_subcommand("check-condition", "Evaluate a sufficient recovery condition");
  std::vector<std::string> kinds;
  for (auto k : all_condition_kinds()) kinds.emplace_back(to_string(k));
  c->add_option("--kind", a.kind)->required()->check(CLI::IsMember(kinds));
  c->add_option("--m", a.params.m)->required();
  c->add_option("--r", a.params.r)->required();
  c->add_option("--n1", a.params.n1)->required();
  c->add_option("--n2", a.params.n2)->required();
  c->add_option("--delta", a.params.delta);
  c->add_option("--mu", a.params.mu);
  c->add_option("--sigma", a.params.sigma_n);
  c->add_option("--nu", a.params.nu);
  c->add_option("--validate-trials", a.trials, "also run this many Monte Carlo trials");
  c->add_option("--seed", a.seed);
  c->add_option("--threads", a.threads);
}

int run_condition(const ConditionArgs& a) {
  const ConditionKind kind = condition_kind_from_string(a.kind);
  const ConditionReport rep = check_condition(kind, a.params);
  std::cout << rep.to_record();
  if (a.trials > 0)
    std::cout << ",empirical=" << validate_condition_empirically(kind, a.params, a.trials, a.seed, a.threads);
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherence Pursuit: robust subspace recovery and experiment harness",
               "coherence-pursuit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer("Every subcommand also accepts --config FILE (flat key=value, flags override).");

  GenArgs gen;
  CopArgs copa;
  PhaseArgs phase;
  NoiseArgs noise;
  StructuredArgs structured;
  ClusterArgs cluster;
  SaliencyArgs sal;
  BenchArgs bench;
  ConditionArgs cond;
  add_gen(app, gen);
  add_cop(app, copa);
  add_phase(app, phase);
  add_noise(app, noise);
  add_structured(app, structured);
  add_cluster(app, cluster);
  add_saliency(app, sal);
  add_bench(app, bench);
  add_condition(app, cond);
  for (auto* sub : app.get_subcommands({})) {
    sub->add_option("--config", "flat key=value file; flags override it");
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(args);
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const cop::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "gen") return run_gen(gen);
    if (name == "cop") return run_cop(copa);
    if (name == "phase") return run_phase(phase);
    if (name == "noise-sweep") {
      const auto res = run_noise_sweep(noise.cfg);
      with_output(noise.csv, [&](std::ostream& o) { res.write_csv(o); });
      return 0;
    }
    if (name == "structured-sweep") {
      const auto res = run_structured_sweep(structured.cfg);
      with_output(structured.csv, [&](std::ostream& o) { res.write_csv(o); });
      return 0;
    }
    if (name == "cluster-correct") {
      const auto res = run_cluster_correction(cluster.cfg);
      with_output(cluster.csv, [&](std::ostream& o) { res.write_csv(o); });
      return 0;
    }
    if (name == "saliency") return run_saliency_cmd(sal);
    if (name == "bench") return run_bench(bench);
    if (name == "check-condition") return run_condition(cond);
  } catch (const cop::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const cop::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
