#include "slqg/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "slqg/equilibria.hpp"
#include "slqg/inconsistency.hpp"
#include "slqg/io.hpp"
#include "slqg/wellposed.hpp"

namespace slqg {

namespace {

constexpr int kUsageExit = 64;
constexpr std::uint64_t kDefaultSeed = 42;  // documented default, keep stable

int default_grid_n() {
  if (const char* env = std::getenv("ERE_DEFAULT_GRID_N")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) {
      throw Error(ErrorCategory::validation,
                  "ERE_DEFAULT_GRID_N must be a positive integer");
    }
    return static_cast<int>(v);
  }
  return 1000;
}

void ensure_valid(const GameSpec& spec, const TimeGrid& grid) {
  const ValidationReport report = validate_spec(spec, grid);
  if (!report.valid) {
    std::ostringstream msg;
    msg << "game spec fails the standing assumptions:";
    for (const ValidationIssue& issue : report.issues) {
      msg << "\n  - " << issue.message;
      if (issue.node_index >= 0) msg << " (node " << issue.node_index << ")";
    }
    throw Error(ErrorCategory::validation, msg.str());
  }
}

Eigen::VectorXd parse_vector(const std::string& text, int n) {
  Eigen::VectorXd v(n);
  std::istringstream ss(text);
  std::string cell;
  int k = 0;
  while (std::getline(ss, cell, ',')) {
    if (k >= n) {
      throw Error(ErrorCategory::validation, "x0 has too many entries");
    }
    v(k++) = std::stod(cell);
  }
  if (k != n) {
    throw Error(ErrorCategory::validation,
                "x0 needs " + std::to_string(n) + " comma-separated entries");
  }
  return v;
}

int run_solve(const std::string& spec_path, int grid_n,
              const std::string& out_path) {
  const GameSpec spec = load_game_spec(spec_path);
  const TimeGrid grid = TimeGrid::uniform(spec.horizon_T, grid_n);
  ensure_valid(spec, grid);
  const EreSolution sol = solve_ere(spec, grid);

  std::ostringstream csv;
  write_solution_csv(csv, sol);
  write_text_file(out_path, csv.str());

  double worst_residual = 0;
  for (const NodeDiagnostics& d : sol.diagnostics) {
    worst_residual = std::max(worst_residual, d.residual_norm);
  }
  std::cout << "solved on " << grid_n << " steps, horizon " << grid.T << "\n"
            << "P1(0) = " << format_double(sol.P1[0](0, 0))
            << "  P2(0) = " << format_double(sol.P2[0](0, 0)) << "\n"
            << "max stationarity residual over nodes = "
            << format_double(worst_residual) << "\n"
            << "wrote " << out_path << "\n";
  return 0;
}

int run_check(const std::string& spec_path, int grid_n, bool assume_smooth) {
  const GameSpec spec = load_game_spec(spec_path);
  const TimeGrid grid = TimeGrid::uniform(spec.horizon_T, grid_n);
  ensure_valid(spec, grid);
  const WellPosednessReport rep = classify(spec, grid, assume_smooth);
  std::cout << "classification: " << to_string(rep.case_label) << "\n";
  std::cout << "inf_t |D2(t)| = " << format_double(rep.d2_lower_bound) << "\n";
  if (rep.case_label == CaseLabel::case_iii ||
      (rep.d2_lower_bound == 0.0 && spec.dims.n > 1)) {
    std::cout << "B2 full rank at every node: " << (rep.rank_ok ? "yes" : "no")
              << "\n"
              << "min eig of B2 R2^-1 B2' over nodes = "
              << format_double(rep.s_min_eig) << "\n";
  }
  std::cout << "coefficient smoothness asserted: "
            << (rep.smoothness_asserted ? "yes" : "no")
            << " (heuristic: " << (rep.smoothness_heuristic ? "yes" : "no")
            << ")\n";
  if (rep.case_label == CaseLabel::unclassified) {
    std::cout << "no sufficient condition matched; the equilibrium equations "
                 "may still be solvable\n";
  } else {
    std::cout << "a global equilibrium of the announced-gain game exists for "
                 "this class\n";
  }
  return 0;
}

int run_simulate(const std::string& spec_path, const std::string& gains_path,
                 int paths, std::uint64_t seed, const std::string& out_path,
                 const std::string& x0_text, int workers) {
  const GameSpec spec = load_game_spec(spec_path);
  const GainSchedule gains = load_gain_schedule(gains_path, spec.dims);
  if (std::abs(gains.grid.T - spec.horizon_T) >
      1e-9 * (1.0 + std::abs(spec.horizon_T))) {
    throw Error(ErrorCategory::validation,
                "gain schedule horizon does not match the game spec");
  }
  ensure_valid(spec, gains.grid);
  const Eigen::VectorXd x0 = x0_text.empty()
                                 ? Eigen::VectorXd::Ones(spec.dims.n)
                                 : parse_vector(x0_text, spec.dims.n);
  const PathEnsemble ensemble =
      simulate(gains, x0, spec, gains.grid, paths, seed, workers);

  std::ostringstream csv;
  write_ensemble_csv(csv, ensemble, spec);
  write_text_file(out_path, csv.str());

  const CostEstimate j1 = estimate_cost(ensemble, spec, Player::leader);
  const CostEstimate j2 = estimate_cost(ensemble, spec, Player::follower);
  std::cout << "simulated " << paths << " paths on " << gains.grid.N
            << " steps (seed " << seed << ")\n"
            << "leader cost   " << format_double(j1.mean) << " +- "
            << format_double(j1.std_error) << "\n"
            << "follower cost " << format_double(j2.mean) << " +- "
            << format_double(j2.std_error) << "\n"
            << "wrote " << out_path << "\n";
  return 0;
}

int run_verify(const std::string& spec_path, int trials, std::uint64_t seed,
               int grid_n, const std::string& json_path) {
  const GameSpec spec = load_game_spec(spec_path);
  const TimeGrid grid = TimeGrid::uniform(spec.horizon_T, grid_n);
  ensure_valid(spec, grid);
  const EreSolution sol = solve_ere(spec, grid);
  const StackelbergCheckReport rep =
      feedback_stackelberg_check(sol, spec, grid, trials, seed);

  auto print_line = [](const char* title, const DeviationReport& d) {
    std::cout << title << ": " << (d.pass ? "PASS" : "FAIL") << " over "
              << d.trials << " trials, worst margin "
              << format_double(d.worst_margin) << "\n  tested class: "
              << d.tested_class << "\n";
  };
  print_line("follower optimality", rep.follower_line);
  print_line("leader optimality", rep.leader_line);
  std::cout << "overall: " << (rep.pass ? "PASS" : "FAIL") << "\n";

  if (!json_path.empty()) {
    std::ostringstream js;
    auto line = [&](const DeviationReport& d) {
      js << "{\"pass\": " << (d.pass ? "true" : "false")
         << ", \"trials\": " << d.trials << ", \"worst_margin\": "
         << format_double(d.worst_margin) << ", \"tested_class\": \""
         << d.tested_class << "\"}";
    };
    js << "{\n  \"follower_line\": ";
    line(rep.follower_line);
    js << ",\n  \"leader_line\": ";
    line(rep.leader_line);
    js << ",\n  \"pass\": " << (rep.pass ? "true" : "false") << "\n}\n";
    write_text_file(json_path, js.str());
    std::cout << "wrote " << json_path << "\n";
  }
  return rep.pass ? 0 : 1;
}

int run_demo_inconsistency(double t_split, bool sweep, int grid_n,
                           const std::string& out_path) {
  if (!(t_split > 0.0 && t_split < 1.0)) {
    throw Error(ErrorCategory::validation,
                "--t-split must lie strictly between 0 and 1");
  }
  const Example11Spec spec;
  const TimeGrid grid = TimeGrid::uniform(spec.T, grid_n);
  const TpbvpSolution sol = solve_open_loop_fbsde(spec, grid);

  std::ostringstream csv;
  csv << "t,x,y,p1,p2,u,v\n";
  for (int i = 0; i <= grid.N; ++i) {
    csv << format_double(grid.node(i)) << ',' << format_double(sol.x_star[i])
        << ',' << format_double(sol.y_star[i]) << ','
        << format_double(sol.p1_star[i]) << ','
        << format_double(sol.p2_star[i]) << ','
        << format_double(sol.u_star[i]) << ','
        << format_double(sol.v_star[i]) << '\n';
  }
  write_text_file(out_path, csv.str());
  std::cout << "open-loop solution on " << grid_n
            << " steps, boundary residual "
            << format_double(sol.boundary_residual) << "; wrote " << out_path
            << "\n";

  auto report_at = [&](int index) {
    const RestartReport rep = restart_experiment(spec, grid, index);
    std::cout << "restart at t = " << format_double(grid.node(index))
              << ": |y*(t)| = " << format_double(rep.y_at_restart)
              << ", sup|u - u*| = " << format_double(rep.u_deviation_sup)
              << ", sup|v - v*| = " << format_double(rep.v_deviation_sup)
              << "\n";
    return rep;
  };

  int split_index = static_cast<int>(std::lround(t_split * grid.N));
  split_index = std::max(1, std::min(grid.N - 1, split_index));
  report_at(split_index);

  if (sweep) {
    std::cout << "sweep over restart times:\n";
    double best_dev = -1.0;
    double best_t = 0.0;
    for (int k = 1; k < 20; ++k) {
      int idx = static_cast<int>(std::lround(k / 20.0 * grid.N));
      idx = std::max(1, std::min(grid.N - 1, idx));
      const RestartReport rep = restart_experiment(spec, grid, idx);
      std::cout << "  t = " << format_double(grid.node(idx))
                << "  sup|u - u*| = " << format_double(rep.u_deviation_sup)
                << "  sup|v - v*| = " << format_double(rep.v_deviation_sup)
                << "\n";
      if (rep.v_deviation_sup > best_dev) {
        best_dev = rep.v_deviation_sup;
        best_t = grid.node(idx);
      }
    }
    std::cout << "leader drift grows toward the horizon; follower drift peaks "
                 "mid-flight at t = "
              << format_double(best_t) << " (interior maximum)\n";
  }
  std::cout << "re-solving from an interior time changes the controls: the "
               "open-loop solution is time-inconsistent\n";
  return 0;
}

int run_reproduce_table2(int grid_n, int paths, std::uint64_t seed,
                         const std::string& out_dir, bool force) {
  const AssetSpec asset = AssetSpec::table2_defaults();
  const TimeGrid grid = TimeGrid::uniform(asset.T, grid_n);
  const FigureBundle bundle =
      reproduce_figures(asset, grid, paths, seed, force);

  std::filesystem::create_directories(out_dir);
  const auto path_for = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };
  {
    std::ostringstream os;
    write_fig1_csv(os, bundle);
    write_text_file(path_for("fig1.csv"), os.str());
  }
  {
    std::ostringstream os;
    write_fig2_csv(os, bundle);
    write_text_file(path_for("fig2.csv"), os.str());
  }
  {
    std::ostringstream os;
    write_fig3_csv(os, bundle);
    write_text_file(path_for("fig3.csv"), os.str());
  }

  const EreSolution& sol = bundle.solution;
  const auto [u0, v0] = shifted_controls(sol, asset, 0, asset.x0);
  std::cout << "two-manager asset game (x0=" << asset.x0 << ", z=" << asset.z
            << ", r=" << asset.r << ", mu=(" << asset.mu1 << "," << asset.mu2
            << "), sigma=(" << asset.sigma1 << "," << asset.sigma2
            << "), T=" << asset.T << ")\n"
            << "grid steps " << grid_n << ", paths " << paths << ", seed "
            << seed << "\n"
            << "P1(0) = " << format_double(sol.P1[0](0, 0)) << "\n"
            << "P2(0) = " << format_double(sol.P2[0](0, 0)) << "\n"
            << "theta1(0) = " << format_double(sol.theta1_bar[0](0, 0)) << "\n"
            << "theta2(0) = " << format_double(sol.theta2_star[0](0, 0))
            << "\n"
            << "initial allocations at X = x0: leader "
            << format_double(u0) << ", follower " << format_double(v0) << "\n"
            << "wrote fig1.csv, fig2.csv, fig3.csv in " << out_dir << "\n";
  return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
  CLI::App app{
      "Stackelberg stochastic linear-quadratic differential games: "
      "equilibrium Riccati solver, well-posedness checks, Monte Carlo "
      "simulation, and a two-manager asset allocation demo"};
  app.require_subcommand(1);

  std::string spec_path, gains_path, out_path, out_dir = ".", json_path;
  std::string x0_text;
  int grid_n = -1;  // -1 = take the default (env override applies)
  int paths = 1000;
  int workers = 0;
  int trials = 100;
  std::uint64_t seed = kDefaultSeed;
  bool assume_smooth = false, sweep = false, force = false;
  double t_split = 0.5;

  CLI::App* solve = app.add_subcommand(
      "solve", "Solve the equilibrium Riccati equations, write a CSV table");
  solve->add_option("--spec", spec_path, "game spec JSON")->required();
  solve->add_option("--grid-n", grid_n,
                    "time steps (default 1000 or ERE_DEFAULT_GRID_N)");
  solve->add_option("--out", out_path, "output CSV path")
      ->default_val("solution.csv");

  CLI::App* check = app.add_subcommand(
      "check", "Classify a spec against the known solvable cases");
  check->add_option("--spec", spec_path, "game spec JSON")->required();
  check->add_option("--grid-n", grid_n, "sampling nodes for the check");
  check->add_flag("--assume-smooth", assume_smooth,
                  "assert time-smoothness of the coefficients");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Euler-Maruyama closed-loop paths under a gain schedule");
  simulate->add_option("--spec", spec_path, "game spec JSON")->required();
  simulate->add_option("--gains", gains_path, "gain schedule CSV (from solve)")
      ->required();
  simulate->add_option("--paths", paths, "number of sample paths")
      ->default_val(1000);
  simulate->add_option("--seed", seed, "noise seed")->default_val(kDefaultSeed);
  simulate->add_option("--out", out_path, "output CSV path")
      ->default_val("paths.csv");
  simulate->add_option("--x0", x0_text,
                       "initial state, comma separated (default all ones)");
  simulate->add_option("--workers", workers,
                       "worker threads (0 = hardware concurrency)");

  CLI::App* verify = app.add_subcommand(
      "verify", "Randomized deviation checks of the equilibrium inequalities");
  verify->add_option("--spec", spec_path, "game spec JSON")->required();
  verify->add_option("--trials", trials, "deviations per player")
      ->default_val(100);
  verify->add_option("--seed", seed, "trial seed")->default_val(kDefaultSeed);
  verify->add_option("--grid-n", grid_n, "time steps for the solve");
  verify->add_option("--json", json_path, "also write a JSON report here");

  CLI::App* demo = app.add_subcommand(
      "demo-inconsistency",
      "Open-loop scalar example whose restarted solution changes course");
  demo->add_option("--t-split", t_split,
                   "restart time as a fraction of the horizon")
      ->default_val(0.5);
  demo->add_flag("--sweep", sweep, "tabulate the drift over restart times");
  demo->add_option("--grid-n", grid_n, "time steps");
  demo->add_option("--out", out_path, "output CSV path")
      ->default_val("inconsistency.csv");

  CLI::App* table2 = app.add_subcommand(
      "reproduce-table2",
      "Solve the two-manager asset game and write the figure tables");
  table2->add_option("--grid-n", grid_n,
                     "time steps (default 1000 or ERE_DEFAULT_GRID_N)");
  table2->add_option("--paths", paths, "number of wealth paths")
      ->default_val(3);
  table2->add_option("--seed", seed, "noise seed")->default_val(kDefaultSeed);
  table2->add_option("--out-dir", out_dir, "directory for the CSV tables")
      ->default_val(".");
  table2->add_flag("--force", force, "allow an infeasible wealth target");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("slqg");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageExit;
  }

  try {
    if (grid_n < 0) grid_n = default_grid_n();
    if (solve->parsed()) return run_solve(spec_path, grid_n, out_path);
    if (check->parsed()) return run_check(spec_path, grid_n, assume_smooth);
    if (simulate->parsed()) {
      return run_simulate(spec_path, gains_path, paths, seed, out_path,
                          x0_text, workers);
    }
    if (verify->parsed()) {
      return run_verify(spec_path, trials, seed, grid_n, json_path);
    }
    if (demo->parsed()) {
      return run_demo_inconsistency(t_split, sweep, grid_n, out_path);
    }
    if (table2->parsed()) {
      return run_reproduce_table2(grid_n, paths, seed, out_dir, force);
    }
    std::cerr << "no subcommand given\n";
    return kUsageExit;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? argc - 1 : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_dispatch(args);
}

}  // namespace slqg
