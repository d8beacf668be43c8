// Python bindings for the bandit lower-bound testbed: kernels and posteriors,
// hard-instance construction, adversaries, algorithm runs, bound formulas,
// and the config-driven experiment harness.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpbandit/gpbandit.hpp"

namespace py = pybind11;
using namespace gpb;

PYBIND11_MODULE(_gpbandit, m) {
  m.doc() = "Kernelized-bandit lower-bound testbed";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_ArithmeticError);

  // --- kernels ------------------------------------------------------------
  py::class_<Kernel>(m, "Kernel")
      .def_static("se", &Kernel::se, py::arg("lengthscale"))
      .def_static("matern", &Kernel::matern, py::arg("nu"),
                  py::arg("lengthscale"))
      .def_readonly("lengthscale", &Kernel::lengthscale)
      .def_readonly("nu", &Kernel::nu)
      .def("__call__",
           [](const Kernel& k, const Vec& x, const Vec& y) {
             return eval_kernel(k, x, y);
           })
      .def("at_distance", &eval_kernel_r, py::arg("r"));

  m.def("kernel_matrix", &kernel_matrix, py::arg("kernel"), py::arg("X"));
  m.def("info_gain", &info_gain, py::arg("kernel"), py::arg("noise_var"),
        py::arg("X"));
  m.def("max_info_gain_greedy", &max_info_gain_greedy, py::arg("kernel"),
        py::arg("noise_var"), py::arg("grid"), py::arg("T"));
  m.def("uniform_grid", &uniform_grid, py::arg("dim"), py::arg("per_axis"));

  // --- function instances -------------------------------------------------
  py::class_<FunctionInstance>(m, "FunctionInstance")
      .def("__call__",
           [](const FunctionInstance& f, const Vec& x) { return f(x); })
      .def_readonly("height", &FunctionInstance::height)
      .def_readonly("width", &FunctionInstance::width)
      .def_readonly("center", &FunctionInstance::center)
      .def_readonly("norm_certificate", &FunctionInstance::norm_certificate)
      .def("values",
           [](const FunctionInstance& f, const Mat& X) {
             Vec out(X.rows());
             for (int i = 0; i < X.rows(); ++i)
               out(i) = f(X.row(i).transpose());
             return out;
           },
           py::arg("X"));

  m.def(
      "min_norm_certificate",
      [](const Kernel& k, const FunctionInstance& f, const Mat& grid) {
        return min_norm_certificate(k, f, grid);
      },
      py::arg("kernel"), py::arg("f"), py::arg("grid"));

  // --- hard-instance classes ----------------------------------------------
  py::class_<HardClass>(m, "HardClass")
      .def_readonly("members", &HardClass::members)
      .def_readonly("epsilon", &HardClass::epsilon)
      .def_readonly("width", &HardClass::width)
      .def_readonly("B", &HardClass::B)
      .def_readonly("dim", &HardClass::dim)
      .def_readonly("xi", &HardClass::xi)
      .def_property_readonly("kind",
                             [](const HardClass& c) { return to_string(c.kind); })
      .def("M", &HardClass::M)
      .def("regions", &HardClass::regions)
      .def("region_center", &HardClass::region_center, py::arg("j"))
      .def("member_peak_value", &HardClass::member_peak_value,
           py::arg("members_idx"))
      .def("manifest", [](const HardClass& c) { return to_manifest(c); });

  m.def("class_from_manifest",
        [](const std::string& text) { return from_manifest(text); },
        py::arg("text"));
  py::class_<BuildOptions>(m, "BuildOptions").def(py::init<>());
  m.def("build_standard_class", &build_standard_class, py::arg("kernel"),
        py::arg("eps"), py::arg("B"), py::arg("dim"), py::arg("kappa") = 1.0,
        py::arg("opts") = BuildOptions{});
  m.def("build_simplified_matern_class", &build_simplified_matern_class,
        py::arg("nu"), py::arg("lengthscale"), py::arg("eps"), py::arg("B"),
        py::arg("dim"), py::arg("kappa") = 1.0,
        py::arg("opts") = BuildOptions{});
  m.def("build_final_point_class", &build_final_point_class, py::arg("kernel"),
        py::arg("xi"), py::arg("eps"), py::arg("B"), py::arg("dim"),
        py::arg("eta"), py::arg("opts") = BuildOptions{});

  m.def("vbar_table", &vbar_table, py::arg("cls"), py::arg("grid_per_region"));
  m.def("kl_table", &kl_table, py::arg("cls"), py::arg("noise_var"),
        py::arg("grid_per_region"));
  m.def("certificates_on_lattice", &certificates_on_lattice, py::arg("cls"),
        py::arg("per_axis"));
  m.def("region_of", &region_of, py::arg("cls"), py::arg("x"));

  // --- adversaries --------------------------------------------------------
  m.def("corruptible_count", &corruptible_count, py::arg("cls"),
        py::arg("sampled"), py::arg("budget"));
  m.def(
      "xi_regret",
      [](const FunctionInstance& f, const Vec& x, double xi, int res) {
        return xi_regret(f, x, xi, res);
      },
      py::arg("f"), py::arg("x"), py::arg("xi"), py::arg("grid_resolution"));
  m.def(
      "worst_case_value",
      [](const FunctionInstance& f, const Vec& x, double xi, int res) {
        return worst_case_value(f, x, xi, res);
      },
      py::arg("f"), py::arg("x"), py::arg("xi"), py::arg("grid_resolution"));

  // --- bound formulas -----------------------------------------------------
  m.def("kl_gaussian", &kl_gaussian, py::arg("mu1"), py::arg("mu2"),
        py::arg("noise_var"));
  m.def("beta_t", &beta_t, py::arg("B"), py::arg("noise_var"),
        py::arg("gamma_prev"), py::arg("delta"));
  m.def("c1_constant", &c1_constant, py::arg("noise_var"));
  m.def("upper_bound_gpucb", &upper_bound_gpucb, py::arg("T"), py::arg("B"),
        py::arg("noise_var"), py::arg("delta"), py::arg("gamma_T"));

  py::class_<BoundSpec>(m, "BoundSpec")
      .def(py::init<>())
      .def_readwrite("epsilon", &BoundSpec::epsilon)
      .def_readwrite("B", &BoundSpec::B)
      .def_readwrite("noise_var", &BoundSpec::noise_var)
      .def_readwrite("delta", &BoundSpec::delta)
      .def_readwrite("dim", &BoundSpec::dim)
      .def_readwrite("nu", &BoundSpec::nu)
      .def_readwrite("lengthscale", &BoundSpec::lengthscale)
      .def_readwrite("C", &BoundSpec::C)
      .def_readwrite("xi", &BoundSpec::xi)
      .def_readwrite("T", &BoundSpec::T)
      .def_readwrite("knob", &BoundSpec::knob)
      .def_readwrite("allow_large_c", &BoundSpec::allow_large_c)
      .def_property(
          "setting",
          [](const BoundSpec& s) { return to_string(s.setting); },
          [](BoundSpec& s, const std::string& v) {
            s.setting = bound_setting_from_string(v);
          })
      .def_property(
          "family",
          [](const BoundSpec& s) {
            return s.family == KernelFamily::SE ? "se" : "matern";
          },
          [](BoundSpec& s, const std::string& v) {
            require_config(v == "se" || v == "matern", "family must be se|matern");
            s.family = v == "se" ? KernelFamily::SE : KernelFamily::Matern;
          });
  m.def("lower_bound", &lower_bound, py::arg("spec"));

  py::class_<BoundQuery>(m, "BoundQuery")
      .def_readonly("spec", &BoundQuery::spec)
      .def_readonly("parameter", &BoundQuery::parameter)
      .def_readonly("values", &BoundQuery::values);
  m.def("parse_bound_query", &parse_bound_query, py::arg("json_text"));
  m.def("bound_curve_csv", &bound_curve_csv, py::arg("query"));

  py::class_<RelatingCheck>(m, "RelatingCheck")
      .def_readonly("lhs", &RelatingCheck::lhs)
      .def_readonly("rhs", &RelatingCheck::rhs)
      .def_readonly("holds", &RelatingCheck::holds);
  m.def("relating_check", &relating_check, py::arg("expected_counts"),
        py::arg("divergences"), py::arg("delta"));
  m.def("divergence_decomposition", &divergence_decomposition,
        py::arg("expected_counts"), py::arg("divergences"));

  // --- harness ------------------------------------------------------------
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("name", &ExperimentConfig::name)
      .def_readwrite("noise_var", &ExperimentConfig::noise_var)
      .def_readwrite("horizon", &ExperimentConfig::horizon)
      .def_readwrite("replicates", &ExperimentConfig::replicates)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("out", &ExperimentConfig::out)
      .def("target", &ExperimentConfig::target);
  m.def("parse_config", &parse_config, py::arg("json_text"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("class_from_config", &class_from_config, py::arg("config"));

  py::class_<ResultRow>(m, "ResultRow")
      .def_readonly("member", &ResultRow::member)
      .def_readonly("replicate", &ResultRow::replicate)
      .def_readonly("T", &ResultRow::T)
      .def_readonly("R_T", &ResultRow::R_T)
      .def_readonly("simple_regret", &ResultRow::simple_regret)
      .def_readonly("xi_regret", &ResultRow::xi_regret)
      .def_readonly("spent", &ResultRow::spent)
      .def_readonly("success", &ResultRow::success)
      .def_property_readonly("time_to_eps", [](const ResultRow& r) {
        return r.time_to_eps ? py::cast(*r.time_to_eps)
                             : py::object(py::none());
      });

  py::class_<Aggregate>(m, "Aggregate")
      .def_readonly("n", &Aggregate::n)
      .def_readonly("errored", &Aggregate::errored)
      .def_readonly("mean_RT", &Aggregate::mean_RT)
      .def_readonly("median_RT", &Aggregate::median_RT)
      .def_readonly("median_simple", &Aggregate::median_simple)
      .def_readonly("median_xi", &Aggregate::median_xi)
      .def_readonly("median_time_to_eps", &Aggregate::median_time_to_eps)
      .def_readonly("successes", &Aggregate::successes)
      .def_readonly("success_rate", &Aggregate::success_rate)
      .def_readonly("success_lo", &Aggregate::success_lo)
      .def_readonly("success_hi", &Aggregate::success_hi);

  py::class_<ExperimentResult>(m, "ExperimentResult")
      .def_readonly("rows", &ExperimentResult::rows)
      .def_readonly("agg", &ExperimentResult::agg);
  m.def("run_experiment", &run_experiment, py::arg("config"),
        py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("X", &Trajectory::X)
      .def_readonly("y", &Trajectory::y)
      .def_readonly("ytilde", &Trajectory::ytilde)
      .def_readonly("inst_regret", &Trajectory::inst_regret)
      .def_readonly("report_point", &Trajectory::report_point)
      .def_readonly("T", &Trajectory::T)
      .def("cumulative_regret", &Trajectory::cumulative_regret)
      .def("simple_regret", &Trajectory::simple_regret);
  m.def("rerun_cell", &rerun_cell, py::arg("config"), py::arg("ordinal"),
        py::arg("replicate"), py::call_guard<py::gil_scoped_release>());

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("value", &SweepPoint::value)
      .def_readonly("metric", &SweepPoint::metric)
      .def_readonly("bound", &SweepPoint::bound);
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("points", &SweepResult::points)
      .def_readonly("metric_name", &SweepResult::metric_name)
      .def_readonly("slope_defined", &SweepResult::slope_defined)
      .def_readonly("slope", &SweepResult::slope);
  m.def("scaling_sweep", &scaling_sweep, py::arg("config"),
        py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("pass_", &CheckResult::pass)
      .def_readonly("skipped", &CheckResult::skipped)
      .def_readonly("measured", &CheckResult::measured);
  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("checks", &VerifyReport::checks)
      .def("all_pass", &VerifyReport::all_pass)
      .def("text", &VerifyReport::to_text);
  m.def("verify_lemmas", &verify_lemmas, py::arg("config"),
        py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());

  m.def("rows_csv", &rows_csv, py::arg("rows"));
  m.def("parse_rows_csv", &parse_rows_csv, py::arg("text"));
  m.def("aggregate_rows", &aggregate_rows, py::arg("rows"));
}
