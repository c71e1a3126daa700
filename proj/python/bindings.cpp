#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gfa/activity.hpp"
#include "gfa/error.hpp"
#include "gfa/evaluation.hpp"
#include "gfa/inference.hpp"
#include "gfa/io.hpp"
#include "gfa/rotation.hpp"
#include "gfa/synthetic.hpp"
#include "gfa/version.hpp"

namespace py = pybind11;
using namespace gfa;

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Group factor analysis: variational inference, rotation, activity and evaluation";
    mod.attr("__version__") = std::string(kVersion);

    py::register_exception<UsageError>(mod, "UsageError", PyExc_ValueError);
    py::register_exception<IoError>(mod, "IoError", PyExc_OSError);
    py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

    // data
    py::class_<ViewPartition>(mod, "ViewPartition")
        .def(py::init<std::vector<Index>, std::vector<std::string>>(), py::arg("dims"),
             py::arg("names") = std::vector<std::string>{})
        .def_property_readonly("dims", &ViewPartition::dims)
        .def_property_readonly("names", &ViewPartition::names)
        .def_property_readonly("view_count", &ViewPartition::view_count)
        .def_property_readonly("total_dim", &ViewPartition::total_dim)
        .def("offset", &ViewPartition::offset)
        .def("dim", &ViewPartition::dim);

    py::class_<DataCollection>(mod, "DataCollection")
        .def(py::init<ViewPartition, Matrix>(), py::arg("partition"), py::arg("data"))
        .def_property_readonly("partition", &DataCollection::partition)
        .def_property_readonly("data", &DataCollection::data)
        .def_property_readonly("n_samples", &DataCollection::n_samples)
        .def_property_readonly("view_count", &DataCollection::view_count)
        .def("view", [](const DataCollection& d, Index m) -> Matrix { return d.view(m); });

    py::class_<PreprocessRecord>(mod, "PreprocessRecord")
        .def_readonly("means", &PreprocessRecord::means)
        .def_readonly("scales", &PreprocessRecord::scales)
        .def_readonly("constant_columns", &PreprocessRecord::constant_columns);

    mod.def("load_collection", &load_collection, py::arg("manifest"));
    mod.def("save_collection", &save_collection, py::arg("collection"), py::arg("directory"));
    mod.def("center", &center, py::arg("collection"), py::arg("scale") = false);

    // model
    py::enum_<PriorMode>(mod, "PriorMode")
        .value("group_ard", PriorMode::group_ard)
        .value("shared_ard", PriorMode::shared_ard)
        .value("none", PriorMode::none);

    py::class_<Hyperparameters>(mod, "Hyperparameters")
        .def(py::init<>())
        .def_readwrite("a0", &Hyperparameters::a0)
        .def_readwrite("b0", &Hyperparameters::b0)
        .def_readwrite("a_tau0", &Hyperparameters::a_tau0)
        .def_readwrite("b_tau0", &Hyperparameters::b_tau0)
        .def_readwrite("prior_mode", &Hyperparameters::prior_mode);

    py::class_<RotationConfig>(mod, "RotationConfig")
        .def(py::init<>())
        .def_readwrite("max_iter", &RotationConfig::max_iter)
        .def_readwrite("grad_tol", &RotationConfig::grad_tol)
        .def_readwrite("memory", &RotationConfig::memory)
        .def_readwrite("quad_floor", &RotationConfig::quad_floor)
        .def_readwrite("value_rel_tol", &RotationConfig::value_rel_tol);

    py::class_<FitConfig>(mod, "FitConfig")
        .def(py::init<>())
        .def_readwrite("K", &FitConfig::K)
        .def_readwrite("max_iter", &FitConfig::max_iter)
        .def_readwrite("elbo_rel_tol", &FitConfig::elbo_rel_tol)
        .def_readwrite("rotation_enabled", &FitConfig::rotation_enabled)
        .def_readwrite("rotation_period", &FitConfig::rotation_period)
        .def_readwrite("rotation_start", &FitConfig::rotation_start)
        .def_readwrite("precision_warmup", &FitConfig::precision_warmup)
        .def_readwrite("seed", &FitConfig::seed)
        .def_readwrite("epsilon", &FitConfig::epsilon)
        .def_readwrite("hyper", &FitConfig::hyper)
        .def_readwrite("rotation", &FitConfig::rotation);

    py::class_<Posterior>(mod, "Posterior")
        .def(py::init<>())
        .def_readwrite("z_mean", &Posterior::z_mean)
        .def_readwrite("z_cov", &Posterior::z_cov)
        .def_readwrite("w_mean", &Posterior::w_mean)
        .def_readwrite("w_cov", &Posterior::w_cov)
        .def_readwrite("alpha_shape", &Posterior::alpha_shape)
        .def_readwrite("alpha_rate", &Posterior::alpha_rate)
        .def_readwrite("tau_shape", &Posterior::tau_shape)
        .def_readwrite("tau_rate", &Posterior::tau_rate)
        .def_property_readonly("factors", &Posterior::factors)
        .def("loadings", &Posterior::loadings)
        .def("expected_alpha", &Posterior::expected_alpha)
        .def("expected_tau", &Posterior::expected_tau);

    py::class_<FitResult>(mod, "FitResult")
        .def_readonly("posterior", &FitResult::posterior)
        .def_readonly("elbo_trace", &FitResult::elbo_trace)
        .def_readonly("n_iter", &FitResult::n_iter)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("empty_factor_count", &FitResult::empty_factor_count)
        .def_readonly("rotations_applied", &FitResult::rotations_applied)
        .def_readonly("warnings", &FitResult::warnings);

    mod.def("fit", &fit, py::arg("data"), py::arg("config") = FitConfig{}, py::arg("observer") = FitObserver{},
            py::call_guard<py::gil_scoped_release>());
    mod.def("elbo", &elbo, py::arg("posterior"), py::arg("data"), py::arg("hyper") = Hyperparameters{});
    mod.def(
        "load_model",
        [](const std::filesystem::path& path) {
            auto model = model_from_json(read_json(path));
            return py::make_tuple(model.config, model.result);
        },
        py::arg("path"), "Returns (FitConfig, FitResult) from a model JSON file.");

    // rotation
    py::class_<RotationProblem>(mod, "RotationProblem")
        .def(py::init<>())
        .def_readwrite("zz", &RotationProblem::zz)
        .def_readwrite("ww", &RotationProblem::ww)
        .def_readwrite("dims", &RotationProblem::dims)
        .def_readwrite("n_samples", &RotationProblem::n_samples)
        .def_property_readonly("C", &RotationProblem::C)
        .def_static("from_posterior", &RotationProblem::from_posterior, py::arg("posterior"),
                    py::arg("mode") = PriorMode::group_ard);

    py::class_<RotationResult>(mod, "RotationResult")
        .def_readonly("R", &RotationResult::R)
        .def_readonly("objective", &RotationResult::objective)
        .def_readonly("initial_objective", &RotationResult::initial_objective)
        .def_readonly("iterations", &RotationResult::iterations)
        .def_readonly("converged", &RotationResult::converged);

    mod.def("rotation_objective", &rotation_objective, py::arg("R"), py::arg("problem"),
            py::arg("quad_floor") = 1e-12);
    mod.def("rotation_gradient", &rotation_gradient, py::arg("R"), py::arg("problem"),
            py::arg("quad_floor") = 1e-12);
    mod.def("optimize_rotation", &optimize_rotation, py::arg("problem"), py::arg("config") = RotationConfig{});
    mod.def(
        "apply_rotation",
        [](Posterior posterior, const Matrix& R, const Hyperparameters& hyper) {
            apply_rotation(posterior, R, hyper);
            return posterior;
        },
        py::arg("posterior"), py::arg("R"), py::arg("hyper") = Hyperparameters{},
        "Returns a rotated copy of the posterior.");

    // activity
    py::class_<ActivityMatrix>(mod, "ActivityMatrix")
        .def_readonly("F", &ActivityMatrix::F)
        .def_readonly("variance_share", &ActivityMatrix::variance_share)
        .def_readonly("threshold", &ActivityMatrix::threshold)
        .def_readonly("epsilon", &ActivityMatrix::epsilon)
        .def("cardinality", &ActivityMatrix::cardinality)
        .def("empty_count", &ActivityMatrix::empty_count);

    mod.def(
        "activity",
        [](const Posterior& posterior, const DataCollection& data, double epsilon) {
            return activity_matrix(posterior, view_variance_stats(data, posterior), epsilon);
        },
        py::arg("posterior"), py::arg("data"), py::arg("epsilon") = kDefaultEpsilon);
    mod.def("rank_by_norm", &rank_by_norm, py::arg("posterior"), py::arg("view"));

    py::class_<IscScores>(mod, "IscScores")
        .def_readonly("score", &IscScores::score)
        .def_readonly("degenerate_pairs", &IscScores::degenerate_pairs)
        .def("order", &IscScores::order);
    mod.def("isc_scores", &isc_scores, py::arg("z_mean"), py::arg("segments"));

    // synthetic data
    py::enum_<FactorDistribution>(mod, "FactorDistribution")
        .value("uniform_cardinality", FactorDistribution::uniform_cardinality)
        .value("power_law", FactorDistribution::power_law)
        .value("uniform_subsets", FactorDistribution::uniform_subsets)
        .value("sec4_preset", FactorDistribution::sec4_preset);

    py::class_<GroundTruth>(mod, "GroundTruth")
        .def(py::init<>())
        .def_readwrite("partition", &GroundTruth::partition)
        .def_readwrite("F", &GroundTruth::F)
        .def_readwrite("W", &GroundTruth::W)
        .def_readwrite("noise_variance", &GroundTruth::noise_variance);

    mod.def("generate_truth", &generate_truth, py::arg("M"), py::arg("dims"), py::arg("K"), py::arg("dist"),
            py::arg("seed"), py::arg("power_law_exponent") = 1.0);
    mod.def("sample_collection", &sample_collection, py::arg("truth"), py::arg("N"), py::arg("seed"));

    // evaluation
    py::class_<FactorMatching>(mod, "FactorMatching")
        .def_readonly("est_to_true", &FactorMatching::est_to_true)
        .def_readonly("true_to_est", &FactorMatching::true_to_est)
        .def_readonly("signs", &FactorMatching::signs)
        .def_readonly("w_mse", &FactorMatching::w_mse)
        .def_readonly("width", &FactorMatching::width);

    mod.def("match_factors", &match_factors, py::arg("w_est"), py::arg("w_true"));
    mod.def("match_binary", &match_binary, py::arg("f_est"), py::arg("f_true"));
    mod.def("f_error", &f_error, py::arg("f_est"), py::arg("f_true"), py::arg("matching"));
    mod.def("cardinality_curve", &cardinality_curve, py::arg("F"));
    mod.def("matched_cardinalities", &matched_cardinalities, py::arg("f_est"), py::arg("f_true"),
            py::arg("matching"));
    mod.def("retrieval_map", &retrieval_map, py::arg("z_mean"), py::arg("labels"),
            py::arg("factor_subset") = std::vector<Index>{});
}
