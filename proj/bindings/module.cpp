// Python bindings for the core operations: spec loading, the equilibrium
// solve, well-posedness classification, closed-loop simulation, equilibrium
// diagnostics, the open-loop optimality system, and the asset application.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "slqg/asset.hpp"
#include "slqg/equilibria.hpp"
#include "slqg/errors.hpp"
#include "slqg/game.hpp"
#include "slqg/inconsistency.hpp"
#include "slqg/io.hpp"
#include "slqg/riccati.hpp"
#include "slqg/sim.hpp"
#include "slqg/wellposed.hpp"

namespace py = pybind11;
using namespace slqg;

namespace {

// (N+1) matrices of one shape -> one (N+1, r, c) array.
py::array_t<double> stack(const std::vector<Eigen::MatrixXd>& ms) {
  if (ms.empty()) return py::array_t<double>(std::vector<py::ssize_t>{0, 0, 0});
  const py::ssize_t k = static_cast<py::ssize_t>(ms.size());
  const py::ssize_t r = ms[0].rows(), c = ms[0].cols();
  py::array_t<double> out(std::vector<py::ssize_t>{k, r, c});
  auto buf = out.mutable_unchecked<3>();
  for (py::ssize_t i = 0; i < k; ++i)
    for (py::ssize_t a = 0; a < r; ++a)
      for (py::ssize_t b = 0; b < c; ++b) buf(i, a, b) = ms[i](a, b);
  return out;
}

std::vector<Eigen::MatrixXd> unstack(const py::array_t<double>& arr) {
  if (arr.ndim() != 3) {
    throw py::value_error("gain array must have shape (nodes, rows, cols)");
  }
  auto buf = arr.unchecked<3>();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(buf.shape(0)));
  for (py::ssize_t i = 0; i < buf.shape(0); ++i) {
    Eigen::MatrixXd m(buf.shape(1), buf.shape(2));
    for (py::ssize_t a = 0; a < buf.shape(1); ++a)
      for (py::ssize_t b = 0; b < buf.shape(2); ++b) m(a, b) = buf(i, a, b);
    out[static_cast<std::size_t>(i)] = std::move(m);
  }
  return out;
}

py::array_t<double> grid_times(const TimeGrid& grid) {
  py::array_t<double> out(grid.N + 1);
  auto buf = out.mutable_unchecked<1>();
  for (int i = 0; i <= grid.N; ++i) buf(i) = grid.node(i);
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  auto buf = out.mutable_unchecked<1>();
  for (py::ssize_t i = 0; i < buf.shape(0); ++i)
    buf(i) = v[static_cast<std::size_t>(i)];
  return out;
}

GainSchedule make_schedule(const GameSpec& spec,
                           const py::array_t<double>& theta1,
                           const std::optional<py::array_t<double>>& theta2) {
  GainSchedule gains;
  gains.theta1 = unstack(theta1);
  if (gains.theta1.size() < 2) {
    throw py::value_error("gain schedule needs at least two nodes");
  }
  gains.grid = TimeGrid::uniform(spec.horizon_T,
                                 static_cast<int>(gains.theta1.size()) - 1);
  if (theta2.has_value()) gains.theta2 = unstack(*theta2);
  return gains;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Stackelberg stochastic linear-quadratic games: equilibrium Riccati "
      "solver, simulation, and diagnostics";
  m.attr("__version__") = "1.0.0";

  py::register_exception<Error>(m, "SlqgError");

  py::class_<GameSpec>(m, "GameSpec")
      .def_property_readonly("n", [](const GameSpec& s) { return s.dims.n; })
      .def_property_readonly("m1", [](const GameSpec& s) { return s.dims.m1; })
      .def_property_readonly("m2", [](const GameSpec& s) { return s.dims.m2; })
      .def_property_readonly("horizon",
                             [](const GameSpec& s) { return s.horizon_T; })
      .def_property_readonly("delta",
                             [](const GameSpec& s) { return s.delta; })
      .def("__repr__", [](const GameSpec& s) {
        return "GameSpec(n=" + std::to_string(s.dims.n) +
               ", m1=" + std::to_string(s.dims.m1) +
               ", m2=" + std::to_string(s.dims.m2) +
               ", horizon=" + std::to_string(s.horizon_T) + ")";
      });

  m.def("load_spec", &load_game_spec, py::arg("path"),
        "Load a game description from a JSON file.");
  m.def("parse_spec", &parse_game_spec, py::arg("json_text"),
        "Parse a game description from JSON text.");

  py::class_<EreSolution>(m, "Solution")
      .def_property_readonly(
          "t", [](const EreSolution& s) { return grid_times(s.grid); })
      .def_property_readonly(
          "P1", [](const EreSolution& s) { return stack(s.P1); })
      .def_property_readonly(
          "P2", [](const EreSolution& s) { return stack(s.P2); })
      .def_property_readonly(
          "theta1", [](const EreSolution& s) { return stack(s.theta1_bar); })
      .def_property_readonly(
          "theta2", [](const EreSolution& s) { return stack(s.theta2_star); })
      .def_property_readonly(
          "residuals",
          [](const EreSolution& s) {
            std::vector<double> r(s.diagnostics.size());
            for (std::size_t i = 0; i < r.size(); ++i)
              r[i] = s.diagnostics[i].residual_norm;
            return to_array(r);
          })
      .def_property_readonly("steps",
                             [](const EreSolution& s) { return s.grid.N; })
      .def("__repr__", [](const EreSolution& s) {
        return "Solution(steps=" + std::to_string(s.grid.N) + ")";
      });

  m.def(
      "solve",
      [](const GameSpec& spec, int steps) {
        return solve_ere(spec, TimeGrid::uniform(spec.horizon_T, steps));
      },
      py::arg("spec"), py::arg("steps") = 1000,
      py::call_guard<py::gil_scoped_release>(),
      "Backward sweep of the coupled equilibrium Riccati system.");

  py::class_<WellPosednessReport>(m, "WellPosednessReport")
      .def_property_readonly("case_label",
                             [](const WellPosednessReport& r) {
                               return std::string(to_string(r.case_label));
                             })
      .def_readonly("d2_lower_bound", &WellPosednessReport::d2_lower_bound)
      .def_readonly("s_min_eig", &WellPosednessReport::s_min_eig)
      .def_readonly("rank_ok", &WellPosednessReport::rank_ok)
      .def_readonly("smoothness_asserted",
                    &WellPosednessReport::smoothness_asserted)
      .def("__repr__", [](const WellPosednessReport& r) {
        return std::string("WellPosednessReport(case_label='") +
               to_string(r.case_label) + "')";
      });

  m.def(
      "classify",
      [](const GameSpec& spec, int steps, bool smoothness_asserted) {
        return classify(spec, TimeGrid::uniform(spec.horizon_T, steps),
                        smoothness_asserted);
      },
      py::arg("spec"), py::arg("steps") = 1000,
      py::arg("smoothness_asserted") = false,
      "Well-posedness class of the instance, sampled on a uniform grid.");

  py::class_<PathEnsemble>(m, "PathEnsemble")
      .def_property_readonly("num_paths",
                             [](const PathEnsemble& e) { return e.num_paths; })
      .def_property_readonly("seed",
                             [](const PathEnsemble& e) { return e.seed; })
      .def_property_readonly(
          "t", [](const PathEnsemble& e) { return grid_times(e.grid); })
      .def_property_readonly(
          "states",
          [](const PathEnsemble& e) {
            py::array_t<double> out(std::vector<py::ssize_t>{
                e.num_paths, e.grid.N + 1, e.n});
            std::copy(e.states.begin(), e.states.end(), out.mutable_data());
            return out;
          })
      .def_property_readonly(
          "controls_u",
          [](const PathEnsemble& e) {
            py::array_t<double> out(std::vector<py::ssize_t>{
                e.num_paths, e.grid.N + 1, e.m1});
            std::copy(e.controls_u.begin(), e.controls_u.end(),
                      out.mutable_data());
            return out;
          })
      .def_property_readonly(
          "controls_v",
          [](const PathEnsemble& e) {
            py::array_t<double> out(std::vector<py::ssize_t>{
                e.num_paths, e.grid.N + 1, e.m2});
            std::copy(e.controls_v.begin(), e.controls_v.end(),
                      out.mutable_data());
            return out;
          })
      .def_property_readonly(
          "increments",
          [](const PathEnsemble& e) {
            py::array_t<double> out(
                std::vector<py::ssize_t>{e.num_paths, e.grid.N});
            std::copy(e.increments.begin(), e.increments.end(),
                      out.mutable_data());
            return out;
          })
      .def("__repr__", [](const PathEnsemble& e) {
        return "PathEnsemble(num_paths=" + std::to_string(e.num_paths) +
               ", steps=" + std::to_string(e.grid.N) + ")";
      });

  m.def(
      "simulate",
      [](const GameSpec& spec, const py::array_t<double>& theta1,
         const std::optional<py::array_t<double>>& theta2,
         const Eigen::VectorXd& x0, int paths, std::uint64_t seed,
         int workers) {
        const GainSchedule gains = make_schedule(spec, theta1, theta2);
        py::gil_scoped_release release;
        return simulate(gains, x0, spec, gains.grid, paths, seed, workers);
      },
      py::arg("spec"), py::arg("theta1"), py::arg("theta2") = std::nullopt,
      py::arg("x0") = Eigen::VectorXd(), py::arg("paths") = 1000,
      py::arg("seed") = 42, py::arg("workers") = 0,
      "Closed-loop sample paths under node-indexed feedback gains. With "
      "theta2=None the follower best-responds.");

  py::class_<CostEstimate>(m, "CostEstimate")
      .def_readonly("mean", &CostEstimate::mean)
      .def_readonly("std_error", &CostEstimate::std_error)
      .def_readonly("num_paths", &CostEstimate::num_paths)
      .def("__repr__", [](const CostEstimate& c) {
        return "CostEstimate(mean=" + std::to_string(c.mean) +
               ", std_error=" + std::to_string(c.std_error) + ")";
      });

  m.def(
      "estimate_cost",
      [](const PathEnsemble& ensemble, const GameSpec& spec, int player) {
        if (player != 1 && player != 2) {
          throw py::value_error("player must be 1 (leader) or 2 (follower)");
        }
        return estimate_cost(
            ensemble, spec,
            player == 1 ? Player::leader : Player::follower);
      },
      py::arg("ensemble"), py::arg("spec"), py::arg("player"),
      "Monte Carlo cost of an ensemble for player 1 or 2.");

  py::class_<EquilibriumTestReport>(m, "SpikeReport")
      .def_readonly("first_order_quotient",
                    &EquilibriumTestReport::first_order_quotient)
      .def_readonly("predicted_second_order",
                    &EquilibriumTestReport::predicted_second_order)
      .def_readonly("passed", &EquilibriumTestReport::pass)
      .def("__repr__", [](const EquilibriumTestReport& r) {
        return "SpikeReport(first_order_quotient=" +
               std::to_string(r.first_order_quotient) + ")";
      });

  m.def(
      "spike_test",
      [](const GameSpec& spec, const EreSolution& sol, int t_index,
         int eps_steps, const Eigen::MatrixXd& V, const Eigen::VectorXd& xi) {
        PerturbationSpec pert;
        pert.t_index = t_index;
        pert.eps_steps = eps_steps;
        pert.V = V;
        pert.xi = xi;
        return spike_test(pert, sol, spec, sol.grid);
      },
      py::arg("spec"), py::arg("solution"), py::arg("t_index"),
      py::arg("eps_steps"), py::arg("V"), py::arg("xi"),
      "Finite-window leader gain spike against the predicted curvature term.");

  py::class_<DeviationReport>(m, "DeviationReport")
      .def_readonly("passed", &DeviationReport::pass)
      .def_readonly("worst_margin", &DeviationReport::worst_margin)
      .def_readonly("trials", &DeviationReport::trials)
      .def_readonly("tested_class", &DeviationReport::tested_class);

  py::class_<StackelbergCheckReport>(m, "StackelbergCheckReport")
      .def_readonly("follower_line", &StackelbergCheckReport::follower_line)
      .def_readonly("leader_line", &StackelbergCheckReport::leader_line)
      .def_readonly("passed", &StackelbergCheckReport::pass);

  m.def(
      "stackelberg_check",
      [](const GameSpec& spec, const EreSolution& sol, int trials,
         std::uint64_t seed) {
        py::gil_scoped_release release;
        return feedback_stackelberg_check(sol, spec, sol.grid, trials, seed);
      },
      py::arg("spec"), py::arg("solution"), py::arg("trials") = 100,
      py::arg("seed") = 42,
      "Randomized deviation check of both equilibrium inequalities.");

  py::class_<Example11Spec>(m, "OpenLoopSpec")
      .def(py::init<>())
      .def_readwrite("A", &Example11Spec::A)
      .def_readwrite("B1", &Example11Spec::B1)
      .def_readwrite("B2", &Example11Spec::B2)
      .def_readwrite("Q1", &Example11Spec::Q1)
      .def_readwrite("Q2", &Example11Spec::Q2)
      .def_readwrite("R1", &Example11Spec::R1)
      .def_readwrite("R2", &Example11Spec::R2)
      .def_readwrite("G1", &Example11Spec::G1)
      .def_readwrite("G2", &Example11Spec::G2)
      .def_readwrite("T", &Example11Spec::T)
      .def_readwrite("x0", &Example11Spec::x0);

  py::class_<TpbvpSolution>(m, "OpenLoopSolution")
      .def_property_readonly(
          "t", [](const TpbvpSolution& s) { return grid_times(s.grid); })
      .def_property_readonly(
          "x", [](const TpbvpSolution& s) { return to_array(s.x_star); })
      .def_property_readonly(
          "y", [](const TpbvpSolution& s) { return to_array(s.y_star); })
      .def_property_readonly(
          "p1", [](const TpbvpSolution& s) { return to_array(s.p1_star); })
      .def_property_readonly(
          "p2", [](const TpbvpSolution& s) { return to_array(s.p2_star); })
      .def_property_readonly(
          "u", [](const TpbvpSolution& s) { return to_array(s.u_star); })
      .def_property_readonly(
          "v", [](const TpbvpSolution& s) { return to_array(s.v_star); })
      .def_readonly("boundary_residual", &TpbvpSolution::boundary_residual);

  m.def(
      "solve_open_loop",
      [](const Example11Spec& spec, int steps) {
        return solve_open_loop_fbsde(spec, TimeGrid::uniform(spec.T, steps));
      },
      py::arg("spec"), py::arg("steps") = 1000,
      "Shooting solve of the scalar open-loop optimality system.");

  py::class_<RestartReport>(m, "RestartReport")
      .def_readonly("y_at_restart", &RestartReport::y_at_restart)
      .def_readonly("u_deviation_sup", &RestartReport::u_deviation_sup)
      .def_readonly("v_deviation_sup", &RestartReport::v_deviation_sup)
      .def_readonly("restarted", &RestartReport::restarted);

  m.def(
      "restart_experiment",
      [](const Example11Spec& spec, int steps, int t_tilde_index) {
        return restart_experiment(spec, TimeGrid::uniform(spec.T, steps),
                                  t_tilde_index);
      },
      py::arg("spec"), py::arg("steps"), py::arg("t_tilde_index"),
      "Re-solve from an interior time and measure the control drift.");

  py::class_<AssetSpec>(m, "AssetSpec")
      .def(py::init<>())
      .def_static("table2_defaults", &AssetSpec::table2_defaults)
      .def_readwrite("x0", &AssetSpec::x0)
      .def_readwrite("z", &AssetSpec::z)
      .def_readwrite("r", &AssetSpec::r)
      .def_readwrite("mu1", &AssetSpec::mu1)
      .def_readwrite("mu2", &AssetSpec::mu2)
      .def_readwrite("sigma1", &AssetSpec::sigma1)
      .def_readwrite("sigma2", &AssetSpec::sigma2)
      .def_readwrite("T", &AssetSpec::T);

  m.def("asset_to_game", &asset_to_game, py::arg("asset"),
        py::arg("allow_infeasible_target") = false,
        "Map the two-manager asset instance to the canonical game.");
}
