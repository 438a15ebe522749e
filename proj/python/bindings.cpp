#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "robsvm/commands.hpp"
#include "robsvm/consistency.hpp"
#include "robsvm/data.hpp"
#include "robsvm/probabilistic.hpp"
#include "robsvm/solver.hpp"

#include <sstream>

namespace py = pybind11;
using namespace robsvm;

namespace {

Dataset make_dataset(const Matrix& X, const Eigen::VectorXi& y) {
  if (X.rows() != y.size()) throw DimensionError("X and y have different numbers of rows");
  std::vector<LabeledSample> samples;
  samples.reserve(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) samples.push_back({X.row(i).transpose(), y[i]});
  return Dataset(std::move(samples));
}

Matrix features(const Dataset& ds) {
  Matrix X(static_cast<Index>(ds.size()), ds.dim());
  for (std::size_t i = 0; i < ds.size(); ++i) X.row(static_cast<Index>(i)) = ds[i].x.transpose();
  return X;
}

Eigen::VectorXi labels(const Dataset& ds) {
  Eigen::VectorXi y(static_cast<Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) y[static_cast<Index>(i)] = ds[i].y;
  return y;
}

}  // namespace

PYBIND11_MODULE(robsvm, m) {
  m.doc() = "Robust and regularized support vector machines";
  m.attr("__version__") = ROBSVM_VERSION;

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("X"), py::arg("y"))
      .def_property_readonly("X", &features)
      .def_property_readonly("y", &labels)
      .def_property_readonly("dim", &Dataset::dim)
      .def("__len__", &Dataset::size);

  py::class_<NormSpec>(m, "Norm")
      .def_static("l1", &NormSpec::l1)
      .def_static("l2", &NormSpec::l2)
      .def_static("linf", &NormSpec::linf)
      .def_static("ellipsoidal", &NormSpec::ellipsoidal, py::arg("sigma"))
      .def("__call__", &NormSpec::value)
      .def("dual", &NormSpec::dual)
      .def("dual_spec", &NormSpec::dual_spec)
      .def_property_readonly("name", &NormSpec::name);

  py::class_<LinearClassifier>(m, "LinearClassifier")
      .def(py::init([](Vector w, double b) { return LinearClassifier{std::move(w), b}; }), py::arg("w"),
           py::arg("b") = 0.0)
      .def_readwrite("w", &LinearClassifier::w)
      .def_readwrite("b", &LinearClassifier::b)
      .def("decision", &LinearClassifier::decision)
      .def("predict", [](const LinearClassifier& c, const Vector& x) { return predict(c, x); });

  py::class_<AtomicSet>(m, "AtomicSet")
      .def_static("norm_ball", &AtomicSet::norm_ball, py::arg("norm"), py::arg("radius"))
      .def_static("ellipsoid", &AtomicSet::ellipsoid, py::arg("sigma"))
      .def("support", &AtomicSet::support)
      .def("contains", &AtomicSet::contains)
      .def("__repr__", &AtomicSet::describe);

  py::enum_<Aggregation>(m, "Aggregation")
      .value("SUM", Aggregation::SumBudget)
      .value("SINGLE", Aggregation::SingleShift)
      .value("SQRT", Aggregation::SqrtBudget);

  py::class_<SublinearSet>(m, "SublinearSet")
      .def(py::init([](AtomicSet a, Aggregation g) { return SublinearSet{std::move(a), g}; }), py::arg("atomic"),
           py::arg("aggregation") = Aggregation::SumBudget)
      .def_readonly("atomic", &SublinearSet::atomic)
      .def_readonly("aggregation", &SublinearSet::aggregation);

  m.def("empirical_hinge", &empirical_hinge);
  m.def("classification_error", &classification_error);
  m.def("worst_case_loss_lower", &worst_case_loss_lower);
  m.def("worst_case_loss_upper",
        [](const LinearClassifier& c, const Dataset& ds, const SublinearSet& s) {
          const auto r = worst_case_loss_upper(c, ds, s);
          return py::make_tuple(r.value, r.is_exact);
        });
  m.def("brute_force_worst_case",
        py::overload_cast<const LinearClassifier&, const Dataset&, const SublinearSet&, int>(&brute_force_worst_case),
        py::arg("clf"), py::arg("ds"), py::arg("set"), py::arg("resolution"));
  m.def(
      "robust_objective",
      [](const LinearClassifier& c, const Dataset& ds, const SublinearSet& s) {
        return robust_objective(c, robustify(ds, s));
      },
      py::arg("clf"), py::arg("ds"), py::arg("set"));
  m.def(
      "box_robust_objective",
      [](const LinearClassifier& c, const Dataset& ds, const AtomicSet& a) {
        return box_robust_objective(c, ds, BoxSet::replicate(a, ds.size()));
      },
      py::arg("clf"), py::arg("ds"), py::arg("atomic"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("max_iters", &SolverConfig::max_iters)
      .def_readwrite("eta0", &SolverConfig::eta0)
      .def_readwrite("tolerance", &SolverConfig::tolerance)
      .def_readwrite("averaging", &SolverConfig::averaging)
      .def_readwrite("seed", &SolverConfig::seed)
      .def_readwrite("restart_period", &SolverConfig::restart_period)
      .def_readwrite("stall_epochs", &SolverConfig::stall_epochs);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("classifier", &TrainResult::classifier)
      .def_readonly("objective", &TrainResult::objective)
      .def_readonly("iterations_used", &TrainResult::iterations_used)
      .def_readonly("converged", &TrainResult::converged)
      .def_readonly("separable", &TrainResult::separable);

  m.def("train_regularized", &train_regularized, py::arg("ds"), py::arg("norm"), py::arg("c"),
        py::arg("cfg") = SolverConfig{});
  m.def(
      "train_robust",
      [](const Dataset& ds, const SublinearSet& s, const SolverConfig& cfg) { return train_robust(ds, s, cfg); },
      py::arg("ds"), py::arg("set"), py::arg("cfg") = SolverConfig{});

  py::class_<KernelSpec>(m, "Kernel")
      .def_static("linear", &KernelSpec::linear)
      .def_static("polynomial", &KernelSpec::polynomial, py::arg("degree"))
      .def_static("rbf", &KernelSpec::rbf, py::arg("gamma"))
      .def_static("indicator", &KernelSpec::indicator)
      .def("__call__", &KernelSpec::operator())
      .def_property_readonly("name", &KernelSpec::name);

  py::class_<KernelClassifier>(m, "KernelClassifier")
      .def_property_readonly("alphas", &KernelClassifier::alphas)
      .def_property_readonly("b", &KernelClassifier::offset)
      .def("decision", &KernelClassifier::decision)
      .def("predict", &KernelClassifier::predict)
      .def("rkhs_norm", &KernelClassifier::rkhs_norm);

  py::class_<KernelTrainResult>(m, "KernelTrainResult")
      .def_readonly("classifier", &KernelTrainResult::classifier)
      .def_readonly("objective", &KernelTrainResult::objective)
      .def_readonly("iterations_used", &KernelTrainResult::iterations_used)
      .def_readonly("converged", &KernelTrainResult::converged);

  m.def("gram", py::overload_cast<const KernelSpec&, const Dataset&>(&gram));
  m.def("feature_distance", &feature_distance);
  m.def("train_kernel_regularized", &train_kernel_regularized, py::arg("ds"), py::arg("kernel"), py::arg("c"),
        py::arg("cfg") = SolverConfig{});
  m.def("kernel_error", &kernel_error);

  py::class_<DisturbanceModel>(m, "DisturbanceModel")
      .def_static("zero", &DisturbanceModel::zero)
      .def_static("gaussian", &DisturbanceModel::gaussian)
      .def_static("uniform_ball", &DisturbanceModel::uniform_ball)
      .def_static("point_mass", &DisturbanceModel::point_mass)
      .def_static("uniform_budget", &DisturbanceModel::uniform_budget, py::arg("m"), py::arg("n"), py::arg("hi"),
                  py::arg("budget_norm"), py::arg("direction") = std::nullopt);
  m.def("calibrate_chance", &calibrate_chance, py::arg("model"), py::arg("eta"), py::arg("n_draws"),
        py::arg("seed"));
  m.def("chance_bound_check", &chance_bound_check);

  py::class_<BudgetPrior>(m, "BudgetPrior")
      .def_static("point_mass", &BudgetPrior::point_mass)
      .def_static("discrete", &BudgetPrior::discrete)
      .def_static("uniform", &BudgetPrior::uniform)
      .def_static("mixture", &BudgetPrior::mixture)
      .def("__repr__", &BudgetPrior::describe);
  m.def("bayes_regularizer", &bayes_regularizer);

  py::class_<PairingResult>(m, "PairingResult")
      .def_readonly("m", &PairingResult::m)
      .def_readonly("pairs", &PairingResult::pairs)
      .def_readonly("gamma", &PairingResult::gamma);
  m.def(
      "max_pairings_exact",
      [](const Dataset& tr, const Dataset& te, double c) { return max_pairings_exact(tr, te, c); },
      py::arg("train"), py::arg("test"), py::arg("c"));

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("test_error", &BoundReport::test_error)
      .def_readonly("error_bound", &BoundReport::error_bound)
      .def_readonly("test_avg_hinge", &BoundReport::test_avg_hinge)
      .def_readonly("hinge_bound", &BoundReport::hinge_bound)
      .def_readonly("gamma", &BoundReport::gamma);
  m.def("generalization_bound", &generalization_bound, py::arg("clf"), py::arg("train"), py::arg("test"),
        py::arg("c"), py::arg("pairing"), py::arg("K"));

  m.def(
      "gaussian_blobs",
      [](std::size_t n_samples, Index dim, double separation, double sigma, std::uint64_t seed) {
        return gaussian_blobs(n_samples, dim, separation, sigma, seed);
      },
      py::arg("m"), py::arg("n"), py::arg("separation"), py::arg("sigma"), py::arg("seed"));
  m.def("load_dataset", [](const std::string& path) { return load_dataset(path).dataset; });
  m.def("save_dataset", &save_dataset);

  m.def(
      "run_command",
      [](const std::string& command, const std::map<std::string, std::string>& options) {
        RunConfig cfg;
        for (const auto& [k, v] : options) cfg.set(k, v);
        std::ostringstream out;
        const int rc = run_command(command, cfg, out);
        return py::make_tuple(rc, out.str());
      },
      py::arg("command"), py::arg("options") = std::map<std::string, std::string>{},
      "Runs a subcommand and returns (exit_code, JSON-lines report).");
}
