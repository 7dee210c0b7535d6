#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coherence_pursuit/clustering.hpp"
#include "coherence_pursuit/cop.hpp"
#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/metrics.hpp"
#include "coherence_pursuit/numeric.hpp"
#include "coherence_pursuit/saliency.hpp"
#include "coherence_pursuit/synth.hpp"
#include "coherence_pursuit/theory.hpp"

#include <optional>
#include <string>

namespace py = pybind11;
using namespace cop;

namespace {

SamplingStrategy make_strategy(const std::string& name, double q, Index count, Index k,
                               std::optional<double> upsilon, bool noisy) {
  if (name == "greedy") return GreedyRank{};
  if (name == "top-fraction") return TopFraction{q};
  if (name == "fixed-count") return FixedCount{count};
  if (name == "adaptive") return Adaptive{k, upsilon, noisy};
  throw InvalidArgument("unknown strategy '" + name +
                        "' (greedy, top-fraction, fixed-count, adaptive)");
}

ModelKind make_model(const std::string& name, double mu, std::optional<double> inlier_nu, double nu,
                     double sigma, double tau, const std::vector<Index>& dims,
                     const std::vector<Index>& sizes) {
  if (name == "unstructured") return Unstructured{};
  if (name == "structured") return StructuredOutliers{mu, inlier_nu};
  if (name == "noisy") return NoisyInliers{sigma};
  if (name == "additive") return AdditiveNoise{tau};
  if (name == "clustered") return ClusteredInliers{nu};
  if (name == "union") return UnionOfSubspaces{dims, sizes};
  throw InvalidArgument("unknown model '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coherence Pursuit core routines";

  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical, e.what());
    }
  });

  m.def("normalize_columns",
        [](const Matrix& d, bool strict) {
          auto n = normalize_columns(d, strict ? ZeroColumnPolicy::Strict : ZeroColumnPolicy::Lenient);
          return py::make_tuple(n.x, n.survivors, n.dropped);
        },
        py::arg("d"), py::arg("strict") = false,
        "Unit-norm columns plus the indices kept and dropped.");

  m.def("coherence",
        [](const Matrix& x, int p, Index block, unsigned threads) {
          return coherence_kernel(x, coherence_power_from_int(p), block, threads).values;
        },
        py::arg("x"), py::arg("p") = 2, py::arg("block") = kDefaultBlock, py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>(),
        "Coherence values of unit-norm columns.");

  m.def("cop",
        [](const Matrix& d, Index r, int p, const std::string& strategy, double q, Index count,
           Index k, std::optional<double> upsilon, bool noisy, Index passes, std::uint64_t seed,
           unsigned threads) {
          CopConfig cfg;
          cfg.r = r;
          cfg.power = coherence_power_from_int(p);
          cfg.strategy = make_strategy(strategy, q, count, k, upsilon, noisy);
          cfg.passes = passes;
          cfg.seed = seed;
          cfg.threads = threads;
          CopResult res = [&] {
            py::gil_scoped_release release;
            return cop::cop(d, cfg);
          }();
          py::dict out;
          out["basis"] = res.basis.columns();
          out["sampled_indices"] = res.sampled_indices;
          out["profile"] = res.profile.values;
          out["dropped_columns"] = res.dropped_columns;
          out["non_unique"] = res.basis.non_unique();
          return out;
        },
        py::arg("d"), py::arg("r"), py::arg("p") = 2, py::arg("strategy") = "greedy",
        py::arg("q") = 0.5, py::arg("count") = 20, py::arg("k") = 2,
        py::arg("upsilon") = py::none(), py::arg("noisy") = false, py::arg("passes") = 1,
        py::arg("seed") = 0, py::arg("threads") = 0,
        "Recover an r-dimensional subspace. Returns a dict with basis, sampled_indices, "
        "profile, dropped_columns and non_unique.");

  m.def("spca", [](const Matrix& d, Index r) { return spca(d, r).columns(); }, py::arg("d"),
        py::arg("r"));

  m.def("generate",
        [](const std::string& model, Index mdim, Index r, Index n1, Index n2, std::uint64_t seed,
           bool shuffle, double mu, std::optional<double> inlier_nu, double nu, double sigma,
           double tau, std::vector<Index> dims, std::vector<Index> sizes) {
          const ModelSpec spec{make_model(model, mu, inlier_nu, nu, sigma, tau, dims, sizes),
                               mdim, r, n1, n2, seed, shuffle};
          const LabeledDataset ds = generate(spec);
          py::list bases;
          for (const auto& b : ds.subspaces) bases.append(b.columns());
          return py::make_tuple(ds.d, ds.labels, bases);
        },
        py::arg("model") = "unstructured", py::arg("m") = 100, py::arg("r") = 5,
        py::arg("n1") = 50, py::arg("n2") = 50, py::arg("seed") = 0, py::arg("shuffle") = false,
        py::arg("mu") = 1.0, py::arg("inlier_nu") = py::none(), py::arg("nu") = 0.5,
        py::arg("sigma") = 0.1, py::arg("tau") = 0.5, py::arg("dims") = std::vector<Index>{3, 3},
        py::arg("sizes") = std::vector<Index>{100, 100},
        "Synthetic data. Returns (D, labels, [true bases]).");

  m.def("recovery_error",
        [](const Matrix& u, const Matrix& uh) {
          return recovery_error(SubspaceBasis(u), SubspaceBasis(uh));
        },
        py::arg("u_true"), py::arg("u_hat"));

  m.def("tail_f", &tail_f, py::arg("t"), py::arg("m"));
  m.def("t_delta", &t_delta, py::arg("delta"), py::arg("m"));

  m.def("check_condition",
        [](const std::string& kind, double mdim, double r, double n1, double n2, double delta,
           std::optional<double> mu, std::optional<double> sigma, std::optional<double> nu) {
          ConditionParams p{mdim, r, n1, n2, delta, mu, sigma, nu};
          const ConditionReport rep = check_condition(condition_kind_from_string(kind), p);
          py::dict out;
          out["kind"] = std::string(to_string(rep.kind));
          out["lhs"] = rep.lhs;
          out["rhs"] = rep.rhs;
          out["holds"] = rep.holds;
          py::dict inter;
          for (const auto& [name, value] : rep.intermediates) inter[py::str(name)] = value;
          out["intermediates"] = inter;
          return out;
        },
        py::arg("kind"), py::arg("m"), py::arg("r"), py::arg("n1"), py::arg("n2"),
        py::arg("delta") = 0.05, py::arg("mu") = py::none(), py::arg("sigma") = py::none(),
        py::arg("nu") = py::none());

  m.def("clustering_error",
        [](const std::vector<int>& pred, const std::vector<int>& truth, int L) {
          return clustering_error(Clustering{pred, L}, Clustering{truth, L});
        },
        py::arg("pred"), py::arg("truth"), py::arg("L"));

  m.def("saliency",
        [](const Eigen::Matrix<std::uint16_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& img,
           int patch, Index r, double q, int p) {
          GrayImage g;
          g.height = static_cast<int>(img.rows());
          g.width = static_cast<int>(img.cols());
          g.maxval = 65535;
          g.pixels.assign(img.data(), img.data() + img.size());
          SaliencyConfig cfg;
          cfg.patch = patch;
          cfg.r = r;
          cfg.q = q;
          cfg.power = coherence_power_from_int(p);
          return saliency(g, cfg).patch_saliency;
        },
        py::arg("image"), py::arg("patch") = 10, py::arg("r") = 2, py::arg("q") = 0.5,
        py::arg("p") = 2, "Per-patch saliency in [0, 1] of a 2-D uint16 image.");
}
