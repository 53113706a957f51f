#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rsfbl/experiments.hpp"

namespace py = pybind11;
using namespace rsfbl;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-blocklength sum-rate optimization for rate-splitting "
            "multi-antenna downlinks";

  py::class_<ChannelSet>(m, "ChannelSet")
      .def(py::init<int, std::vector<CVector>>(), py::arg("num_tx_antennas"),
           py::arg("channels"))
      .def_property_readonly("num_tx_antennas", &ChannelSet::num_tx_antennas)
      .def_property_readonly("num_users", &ChannelSet::num_users)
      .def("channel", &ChannelSet::channel, py::arg("user"));

  m.def("structured_channels_underloaded", &structured_channels_underloaded,
        py::arg("theta"), py::arg("gamma"));
  m.def("structured_channels_overloaded", &structured_channels_overloaded,
        py::arg("theta1"), py::arg("gamma1"));
  m.def("random_channels", &random_channels, py::arg("num_tx_antennas"),
        py::arg("num_users"), py::arg("variances"), py::arg("seed"));

  py::class_<PowerBudget>(m, "PowerBudget")
      .def(py::init<double>(), py::arg("total_power"))
      .def_static("from_snr_db", &PowerBudget::from_snr_db, py::arg("snr_db"))
      .def_property_readonly("total_power", &PowerBudget::total_power)
      .def_property_readonly("snr_db", &PowerBudget::snr_db);

  py::class_<Precoders>(m, "Precoders")
      .def_static("zeros", &Precoders::zeros, py::arg("num_tx_antennas"),
                  py::arg("num_users"))
      .def_readwrite("common", &Precoders::common)
      .def_readwrite("private_streams", &Precoders::private_streams)
      .def_property_readonly("common_power", &Precoders::common_power)
      .def("private_power", &Precoders::private_power, py::arg("user"))
      .def_property_readonly("total_power", &Precoders::total_power)
      .def_property_readonly("num_users", &Precoders::num_users);

  py::class_<FblParams>(m, "FblParams")
      .def(py::init<std::uint64_t, double>(), py::arg("blocklength"),
           py::arg("bler"))
      .def_static("infinite", &FblParams::infinite, py::arg("bler"))
      .def_property_readonly("blocklength", &FblParams::blocklength)
      .def_property_readonly("bler", &FblParams::bler)
      .def_property_readonly("d_const", &FblParams::d_const)
      .def_property_readonly("is_infinite", &FblParams::is_infinite)
      .def_readonly_static("INFINITE_BLOCKLENGTH",
                           &FblParams::kInfiniteBlocklength);

  m.def("q_function", &q_function, py::arg("x"));
  m.def("q_inverse", &q_inverse, py::arg("eps"));
  m.def("dispersion", &dispersion, py::arg("gamma"));
  m.def("dispersion_penalty", &dispersion_penalty, py::arg("gamma"),
        py::arg("params"));
  m.def("fbl_rate", &fbl_rate, py::arg("gamma"), py::arg("params"));
  m.def("sinr_common", &sinr_common, py::arg("channels"), py::arg("precoders"),
        py::arg("user"));
  m.def("sinr_private", &sinr_private, py::arg("channels"),
        py::arg("precoders"), py::arg("user"));

  py::class_<RateBreakdown>(m, "RateBreakdown")
      .def_readonly("common_rates", &RateBreakdown::common_rates)
      .def_readonly("private_rates", &RateBreakdown::private_rates)
      .def_readonly("common_rate_bound", &RateBreakdown::common_rate_bound)
      .def_readonly("common_split", &RateBreakdown::common_split)
      .def_readonly("total_rates", &RateBreakdown::total_rates)
      .def_readonly("sum_rate", &RateBreakdown::sum_rate)
      .def_readonly("common_split_excess", &RateBreakdown::common_split_excess);

  m.def("evaluate_solution", &evaluate_solution, py::arg("channels"),
        py::arg("precoders"), py::arg("common_split"), py::arg("params"),
        py::arg("budget"));

  py::class_<SchemeKind>(m, "SchemeKind")
      .def_static("incomplete_rsma", &SchemeKind::incomplete_rsma)
      .def_static("sdma", &SchemeKind::sdma)
      .def_static("noma", &SchemeKind::noma, py::arg("common_user"),
                  py::arg("private_user"))
      .def_property_readonly("is_rsma", &SchemeKind::is_rsma)
      .def_property_readonly("is_sdma", &SchemeKind::is_sdma)
      .def_property_readonly("is_noma", &SchemeKind::is_noma)
      .def_property_readonly("uses_common_stream",
                             &SchemeKind::uses_common_stream)
      .def("private_stream_active", &SchemeKind::private_stream_active,
           py::arg("user"))
      .def("common_share_active", &SchemeKind::common_share_active,
           py::arg("user"))
      .def_property_readonly("label", &SchemeKind::label)
      .def_property_readonly("family_label", &SchemeKind::family_label)
      .def("__repr__",
           [](const SchemeKind& s) { return "SchemeKind(" + s.label() + ")"; })
      .def(py::self == py::self);

  m.def("candidates_for", &candidates_for, py::arg("num_users"));

  py::class_<SchemeBlers>(m, "SchemeBlers")
      .def(py::init<>())
      .def_readwrite("rsma", &SchemeBlers::rsma)
      .def_readwrite("noma", &SchemeBlers::noma)
      .def_readwrite("sdma", &SchemeBlers::sdma)
      .def("for_scheme", &SchemeBlers::for_scheme, py::arg("scheme"));

  m.def("per_scheme_params", &per_scheme_params, py::arg("blocklength"),
        py::arg("scheme"), py::arg("blers") = SchemeBlers{});

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("sca_tolerance", &SolveOptions::sca_tolerance)
      .def_readwrite("max_sca_iterations", &SolveOptions::max_sca_iterations)
      .def_readwrite("solver_tolerance", &SolveOptions::solver_tolerance)
      .def_readwrite("max_newton_steps", &SolveOptions::max_newton_steps)
      .def_readwrite("restarts", &SolveOptions::restarts)
      .def_readwrite("restart_seed", &SolveOptions::restart_seed)
      .def_readwrite("disable_dispersion", &SolveOptions::disable_dispersion)
      .def_readwrite("rho_min", &SolveOptions::rho_min)
      .def_readwrite("keep_history", &SolveOptions::keep_history);

  py::class_<SubSolution>(m, "SubSolution")
      .def_readonly("precoders", &SubSolution::precoders)
      .def_readonly("common_split", &SubSolution::common_split)
      .def_readonly("private_rate_bounds", &SubSolution::private_rate_bounds)
      .def_readonly("objective", &SubSolution::objective)
      .def_readonly("common_sinr", &SubSolution::common_sinr)
      .def_readonly("private_sinr", &SubSolution::private_sinr);

  py::enum_<ScaResult::Outcome>(m, "Outcome")
      .value("CONVERGED", ScaResult::Outcome::Converged)
      .value("INFEASIBLE", ScaResult::Outcome::Infeasible)
      .value("SOLVER_FAILURE", ScaResult::Outcome::SolverFailure)
      .value("ITERATION_LIMIT", ScaResult::Outcome::IterationLimit);

  py::class_<ScaResult>(m, "ScaResult")
      .def_readonly("outcome", &ScaResult::outcome)
      .def_readonly("solution", &ScaResult::solution)
      .def_readonly("trace", &ScaResult::trace)
      .def_readonly("iterations", &ScaResult::iterations)
      .def_readonly("message", &ScaResult::message)
      .def_property_readonly("converged", &ScaResult::converged);

  m.def("sca_solve", &sca_solve, py::arg("channels"), py::arg("budget"),
        py::arg("params"), py::arg("qos_bits"), py::arg("scheme"),
        py::arg("options") = SolveOptions{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<FeasibilityCheck>(m, "FeasibilityCheck")
      .def_readonly("ok", &FeasibilityCheck::ok)
      .def_readonly("worst_violation", &FeasibilityCheck::worst_violation)
      .def_readonly("detail", &FeasibilityCheck::detail);

  m.def("verify_exact_feasibility", &verify_exact_feasibility,
        py::arg("channels"), py::arg("budget"), py::arg("params"),
        py::arg("qos_bits"), py::arg("scheme"), py::arg("solution"),
        py::arg("tol") = 1e-5);

  py::class_<BestOfReport>(m, "BestOfReport")
      .def_readonly("per_scheme", &BestOfReport::per_scheme)
      .def_readonly("winner_index", &BestOfReport::winner_index)
      .def_property_readonly("has_winner", &BestOfReport::has_winner)
      .def_property_readonly("winner", &BestOfReport::winner)
      .def_property_readonly("selected", &BestOfReport::selected);

  m.def("solve_best", &solve_best, py::arg("channels"), py::arg("budget"),
        py::arg("blocklength"), py::arg("qos_bits"),
        py::arg("options") = SolveOptions{},
        py::arg("blers") = SchemeBlers{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("scenario_id", &ScenarioConfig::scenario_id)
      .def_readwrite("snr_db", &ScenarioConfig::snr_db)
      .def_readwrite("blocklengths", &ScenarioConfig::blocklengths)
      .def_readwrite("qos_bits", &ScenarioConfig::qos_bits)
      .def_readwrite("blers", &ScenarioConfig::blers)
      .def_readwrite("schemes", &ScenarioConfig::schemes)
      .def_readwrite("sca_tolerance", &ScenarioConfig::sca_tolerance)
      .def_readwrite("solver_tolerance", &ScenarioConfig::solver_tolerance)
      .def_readwrite("max_sca_iterations", &ScenarioConfig::max_sca_iterations)
      .def_readwrite("restarts", &ScenarioConfig::restarts)
      .def_readwrite("num_draws", &ScenarioConfig::num_draws)
      .def_readwrite("base_seed", &ScenarioConfig::base_seed)
      .def_readwrite("output_csv", &ScenarioConfig::output_csv)
      .def("make_channels", &ScenarioConfig::make_channels,
           py::arg("draw_index"));

  m.def(
      "load_config",
      [](const std::string& text) {
        std::istringstream in(text);
        return load_config(in);
      },
      py::arg("text"), "Parses config text in the key = value format.");
  m.def("load_config_file", &load_config_file, py::arg("path"));
  m.def("config_template", &config_template, py::arg("scenario"));
  m.def("template_names", &template_names);
  m.def("default_qos_bits", &default_qos_bits, py::arg("blocklength"));

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("scenario_id", &SweepRecord::scenario_id)
      .def_readonly("channel_draw_index", &SweepRecord::channel_draw_index)
      .def_readonly("blocklength", &SweepRecord::blocklength)
      .def_readonly("scheme", &SweepRecord::scheme)
      .def_readonly("status", &SweepRecord::status)
      .def_readonly("sum_rate_objective", &SweepRecord::sum_rate_objective)
      .def_readonly("sum_rate_evaluated", &SweepRecord::sum_rate_evaluated)
      .def_readonly("per_user_rates", &SweepRecord::per_user_rates)
      .def_readonly("common_power", &SweepRecord::common_power)
      .def_readonly("private_powers", &SweepRecord::private_powers)
      .def_readonly("dispersion_penalty_common",
                    &SweepRecord::dispersion_penalty_common)
      .def_readonly("sca_iterations", &SweepRecord::sca_iterations)
      .def_readonly("wall_time_s", &SweepRecord::wall_time_s);

  m.def("run_sweep", &run_sweep, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<SummaryRow>(m, "SummaryRow")
      .def_readonly("blocklength", &SummaryRow::blocklength)
      .def_readonly("scheme", &SummaryRow::scheme)
      .def_readonly("mean_sum_rate", &SummaryRow::mean_sum_rate)
      .def_readonly("std_sum_rate", &SummaryRow::std_sum_rate)
      .def_readonly("num_optimal", &SummaryRow::num_optimal);

  m.def("aggregate", &aggregate, py::arg("records"));
  m.def("write_csv_file", &write_csv_file, py::arg("path"), py::arg("records"));
  m.def("read_records_csv_file", &read_records_csv_file, py::arg("path"));
  m.def("write_summary_csv_file", &write_summary_csv_file, py::arg("path"),
        py::arg("rows"));
}
