// Python bindings for the odelik library: models, problem data, and the
// derivative methods, mirroring the C++ call signatures.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "odelik/adjoint.hpp"
#include "odelik/bench.hpp"
#include "odelik/fd.hpp"
#include "odelik/forward_sens.hpp"
#include "odelik/likelihood.hpp"
#include "odelik/models_builtin.hpp"

namespace py = pybind11;
using namespace odelik;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Derivatives of Gaussian likelihoods constrained by ODE models: "
      "finite differences, forward sensitivities, and adjoint sweeps.";

  py::register_exception<IntegrationError>(m, "IntegrationError",
                                           PyExc_RuntimeError);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_readonly("name", &ModelSpec::name)
      .def_readonly("state_dim", &ModelSpec::state_dim)
      .def_readonly("param_dim", &ModelSpec::param_dim)
      .def_readonly("horizon", &ModelSpec::horizon);

  m.def("make_linear_diagonal", &make_linear_diagonal, py::arg("p"),
        py::arg("horizon") = 100.0);
  m.def("make_hiv", &make_hiv, py::arg("u0"), py::arg("horizon") = 40.0);
  m.def("hiv_reference_params", &hiv_reference_params);
  m.def("hiv_default_init_state", &hiv_default_init_state);
  m.def("hiv_observation_matrix", &hiv_observation_matrix);

  py::class_<ObservationSet>(m, "ObservationSet")
      .def(py::init<std::vector<double>, Matrix>(), py::arg("times"),
           py::arg("values"))
      .def_property_readonly("times", &ObservationSet::times)
      .def_property_readonly("values", &ObservationSet::values)
      .def("size", &ObservationSet::size)
      .def("obs_dim", &ObservationSet::obs_dim)
      .def("min_gap", &ObservationSet::min_gap)
      .def_static("from_csv", &ObservationSet::from_csv, py::arg("path"))
      .def("to_csv", &ObservationSet::to_csv, py::arg("path"));

  py::class_<PostProcessor>(m, "PostProcessor")
      .def(py::init<Matrix>(), py::arg("P"))
      .def_static("identity", &PostProcessor::identity, py::arg("m"))
      .def_readonly("P", &PostProcessor::P)
      .def("apply", &PostProcessor::apply, py::arg("u"));

  py::class_<GaussianMetric>(m, "GaussianMetric")
      .def(py::init<Matrix>(), py::arg("sigma"))
      .def_static("identity", &GaussianMetric::identity, py::arg("dim"))
      .def_property_readonly("sigma", &GaussianMetric::sigma)
      .def("distance", &GaussianMetric::distance, py::arg("y"),
           py::arg("y_model"));

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("rtol", &SolverConfig::rtol)
      .def_readwrite("atol", &SolverConfig::atol)
      .def_readwrite("max_steps", &SolverConfig::max_steps)
      .def_readwrite("safety", &SolverConfig::safety)
      .def_readwrite("first_step", &SolverConfig::first_step)
      .def_readwrite("max_step", &SolverConfig::max_step)
      .def_readwrite("quadrature_in_error_norm",
                     &SolverConfig::quadrature_in_error_norm);

  py::enum_<FdScheme>(m, "FdScheme")
      .value("Forward", FdScheme::Forward)
      .value("Central", FdScheme::Central);

  py::class_<FdConfig>(m, "FdConfig")
      .def(py::init<>())
      .def_readwrite("scheme", &FdConfig::scheme)
      .def_readwrite("scale", &FdConfig::scale)
      .def_readwrite("floor", &FdConfig::floor);

  py::class_<FdStep>(m, "FdStep")
      .def(py::init([](double scale, double floor) {
             return FdStep{scale, floor};
           }),
           py::arg("scale"), py::arg("floor") = 1.0)
      .def_readwrite("scale", &FdStep::scale)
      .def_readwrite("floor", &FdStep::floor);

  py::class_<StepStats>(m, "StepStats")
      .def_readonly("accepted", &StepStats::accepted)
      .def_readonly("rejected", &StepStats::rejected)
      .def_readonly("rhs_calls", &StepStats::rhs_calls);

  py::class_<MisfitResult>(m, "MisfitResult")
      .def_readonly("misfit", &MisfitResult::misfit)
      .def_readonly("log_likelihood", &MisfitResult::log_likelihood)
      .def_readonly("rhs_evals", &MisfitResult::rhs_evals);

  py::class_<DerivativeReport>(m, "DerivativeReport")
      .def_readonly("method", &DerivativeReport::method)
      .def_readonly("gradient", &DerivativeReport::gradient)
      .def_readonly("hessian", &DerivativeReport::hessian)
      .def_readonly("steps", &DerivativeReport::steps)
      .def_readonly("rhs_evals", &DerivativeReport::rhs_evals)
      .def_readonly("backward_steps", &DerivativeReport::backward_steps)
      .def_readonly("misfit_evals", &DerivativeReport::misfit_evals)
      .def_readonly("gradient_evals", &DerivativeReport::gradient_evals)
      .def_readonly("quadrature_evals", &DerivativeReport::quadrature_evals)
      .def_readonly("hessian_asymmetry", &DerivativeReport::hessian_asymmetry);

  m.def("misfit", &misfit, py::arg("model"), py::arg("obs"), py::arg("metric"),
        py::arg("post"), py::arg("theta"), py::arg("cfg") = SolverConfig{});

  m.def("gradient_fd", &gradient_fd, py::arg("model"), py::arg("obs"),
        py::arg("metric"), py::arg("post"), py::arg("theta"),
        py::arg("fd") = FdConfig{}, py::arg("cfg") = SolverConfig{});
  m.def("gradient_se", &gradient_se, py::arg("model"), py::arg("obs"),
        py::arg("metric"), py::arg("post"), py::arg("theta"),
        py::arg("cfg") = SolverConfig{});
  m.def("gradient_asm", &gradient_asm, py::arg("model"), py::arg("obs"),
        py::arg("metric"), py::arg("post"), py::arg("theta"),
        py::arg("cfg") = SolverConfig{});
  m.def("gradient_smoothed", &gradient_smoothed, py::arg("model"),
        py::arg("obs"), py::arg("metric"), py::arg("post"), py::arg("theta"),
        py::arg("sigma"), py::arg("cfg") = SolverConfig{});

  m.def("hessian_fd", &hessian_fd, py::arg("model"), py::arg("obs"),
        py::arg("metric"), py::arg("post"), py::arg("theta"),
        py::arg("fd") = FdConfig{}, py::arg("cfg") = SolverConfig{});
  m.def("hessian_se", &hessian_se, py::arg("model"), py::arg("obs"),
        py::arg("metric"), py::arg("post"), py::arg("theta"),
        py::arg("cfg") = SolverConfig{});
  m.def("hessian_sa", &hessian_sa, py::arg("model"), py::arg("obs"),
        py::arg("metric"), py::arg("post"), py::arg("theta"),
        py::arg("cfg") = SolverConfig{});
  m.def(
      "hessian_fa",
      [](const ModelSpec& model, const ObservationSet& obs,
         const GaussianMetric& metric, const PostProcessor& post,
         const Vector& theta, std::optional<FdStep> step,
         const SolverConfig& cfg) {
        return step ? hessian_fa(model, obs, metric, post, theta, *step, cfg)
                    : hessian_fa(model, obs, metric, post, theta, cfg);
      },
      py::arg("model"), py::arg("obs"), py::arg("metric"), py::arg("post"),
      py::arg("theta"), py::arg("step") = std::nullopt,
      py::arg("cfg") = SolverConfig{});

  m.def("exact_gradient_linear", &exact_gradient_linear, py::arg("theta"),
        py::arg("times"), py::arg("data"),
        "Closed-form log-likelihood gradient of the diagonal linear model; "
        "negate it to compare with the misfit gradients.");
  m.def("exact_hessian_linear", &exact_hessian_linear, py::arg("theta"),
        py::arg("times"), py::arg("data"));

  m.def(
      "run_experiment",
      [](const std::string& config_path) {
        const ExperimentConfig cfg =
            ExperimentConfig::from_json_file(config_path);
        return run_experiment(cfg).size();
      },
      py::arg("config_path"),
      "Runs the benchmark campaign described by a JSON config file, writes "
      "<output_prefix>.csv and .json, and returns the row count.");
}
