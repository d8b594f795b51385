// Acceptance gate for the Stackelberg LQ toolkit. Each criterion prints one
// [PASS]/[FAIL] line; the binary exits nonzero if any criterion fails. The
// checks run at fixed tolerances against frozen reference values and exact
// structural invariants, never against values produced by the code under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

#include "slqg/asset.hpp"
#include "slqg/cli.hpp"
#include "slqg/equilibria.hpp"
#include "slqg/game.hpp"
#include "slqg/inconsistency.hpp"
#include "slqg/io.hpp"
#include "slqg/riccati.hpp"
#include "slqg/rng.hpp"
#include "slqg/sim.hpp"
#include "slqg/wellposed.hpp"

#include "common.hpp"

namespace {

using namespace slqg;
using slqg::testing::sc;
using slqg::testing::scalar_spec;
using slqg::testing::table2_game;

struct Gate {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& label) {
    if (!cond) {
      ok = false;
      append("FAILED " + label);
    }
  }
  void append(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Shared portfolio instance, solved once on the production grid.
const GameSpec& portfolio_spec() {
  static const GameSpec spec = table2_game();
  return spec;
}

const TimeGrid& portfolio_grid() {
  static const TimeGrid grid = TimeGrid::uniform(10.0, 1000);
  return grid;
}

const EreSolution& portfolio_solution() {
  static const EreSolution sol = solve_ere(portfolio_spec(), portfolio_grid());
  return sol;
}

double portfolio_shifted_x0() {
  const AssetSpec asset = AssetSpec::table2_defaults();
  return asset.x0 - asset.z * std::exp(-asset.r * asset.T);
}

// Keeps the gate output to exactly one line per criterion: the reproduction
// command is chatty by design, so its stdout goes to /dev/null while it runs.
class StdoutSilencer {
 public:
  StdoutSilencer() {
    std::fflush(stdout);
    saved_ = ::dup(1);
    const int devnull = ::open("/dev/null", O_WRONLY);
    ::dup2(devnull, 1);
    ::close(devnull);
  }
  ~StdoutSilencer() {
    std::fflush(stdout);
    ::dup2(saved_, 1);
    ::close(saved_);
  }

 private:
  int saved_ = -1;
};

std::filesystem::path fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("slqg_accept_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

// 1. Golden portfolio run: fast, positive, exact terminal data, leader gain
//    smaller than the follower's everywhere, byte-stable artifacts.
Gate golden_portfolio_run() {
  Gate g;

  const auto t0 = std::chrono::steady_clock::now();
  const EreSolution& sol = portfolio_solution();
  const double solve_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  g.expect(solve_s < 5.0, "solve under 5 s (" + fmt(solve_s) + " s)");

  const int N = portfolio_grid().N;
  bool positive = true, ordered = true;
  for (int i = 0; i <= N; ++i) {
    positive = positive && sol.P1[i](0, 0) > 0.0 && sol.P2[i](0, 0) > 0.0;
    ordered = ordered && std::abs(sol.theta1_bar[i](0, 0)) <
                             std::abs(sol.theta2_star[i](0, 0));
  }
  g.expect(positive, "P1, P2 positive at every node");
  g.expect(sol.P1[N](0, 0) == 1.0 && sol.P2[N](0, 0) == 1.0,
           "terminal values exactly 1");
  g.expect(ordered, "|leader gain| < |follower gain| at every node");

  g.expect(std::abs(sol.P1[0](0, 0) - 1.1063224450) <= 1e-9, "P1(0) regression");
  g.expect(std::abs(sol.P2[0](0, 0) - 1.2272261858) <= 1e-9, "P2(0) regression");
  g.expect(std::abs(sol.theta1_bar[0](0, 0) + 0.2066569558) <= 1e-9,
           "leader gain regression");
  g.expect(std::abs(sol.theta2_star[0](0, 0) + 0.3357953404) <= 1e-9,
           "follower gain regression");

  const auto dir_a = fresh_dir("golden_a");
  const auto dir_b = fresh_dir("golden_b");
  int rc_a = -1, rc_b = -1;
  double cli_s = 0;
  {
    StdoutSilencer mute;
    const auto t1 = std::chrono::steady_clock::now();
    rc_a = cli_dispatch({"reproduce-table2", "--out-dir", dir_a.string()});
    cli_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1)
                .count();
    rc_b = cli_dispatch({"reproduce-table2", "--out-dir", dir_b.string()});
  }
  g.expect(rc_a == 0 && rc_b == 0, "reproduction command exits 0");
  g.expect(cli_s < 5.0, "reproduction under 5 s (" + fmt(cli_s) + " s)");
  for (const char* name : {"fig1.csv", "fig2.csv", "fig3.csv"}) {
    const std::string a = read_text_file((dir_a / name).string());
    const std::string b = read_text_file((dir_b / name).string());
    g.expect(!a.empty() && a == b, std::string(name) + " byte-stable");
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);

  if (g.ok) {
    g.append("solve " + fmt(solve_s) + " s, P1(0)=" + fmt(sol.P1[0](0, 0)) +
             ", P2(0)=" + fmt(sol.P2[0](0, 0)) + ", artifacts byte-stable");
  }
  return g;
}

// 2. Well-posedness classification on three canonical shapes, each of which
//    must also solve cleanly over its whole horizon.
Gate wellposedness_classes() {
  Gate g;

  {
    const GameSpec& spec = portfolio_spec();
    const auto report = classify(spec, portfolio_grid(), false);
    g.expect(report.case_label == CaseLabel::case_i,
             "portfolio instance labelled case_i");
    (void)portfolio_solution();  // throws on any monitor breach
  }

  {
    const GameSpec spec = scalar_spec(0.05, 0.1, 0.4, 0.2, 0.6, 0.0, 1.0, 0.8,
                                      0.5, 0.7, 1.0, 0.5, 2.0, 0.3);
    const TimeGrid grid = TimeGrid::uniform(2.0, 400);
    const auto report = classify(spec, grid, false);
    g.expect(report.case_label == CaseLabel::case_ii,
             "scalar driftless-control instance labelled case_ii");
    const EreSolution sol = solve_ere(spec, grid);
    g.expect(sol.P2[0](0, 0) > 0.0, "case_ii solve completes");
  }

  {
    GameSpec spec;
    spec.dims = Dims{2, 1, 2};
    spec.horizon_T = 1.5;
    spec.delta = 0.5;
    CoefficientSet c;
    c.A = (Eigen::MatrixXd(2, 2) << 0.1, 0.05, 0.0, 0.1).finished();
    c.C = 0.2 * Eigen::MatrixXd::Identity(2, 2);
    c.B1 = (Eigen::MatrixXd(2, 1) << 0.3, -0.1).finished();
    c.D1 = (Eigen::MatrixXd(2, 1) << 0.1, 0.2).finished();
    c.B2 = Eigen::MatrixXd::Identity(2, 2);
    c.D2 = Eigen::MatrixXd::Zero(2, 2);
    c.Q1 = Eigen::MatrixXd::Identity(2, 2);
    c.Q2 = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    c.R1 = sc(1.0);
    c.R2 = Eigen::MatrixXd::Identity(2, 2);
    spec.coeffs = CoefficientProvider(c);
    spec.G1 = Eigen::MatrixXd::Identity(2, 2);
    spec.G2 = 0.5 * Eigen::MatrixXd::Identity(2, 2);

    const TimeGrid grid = TimeGrid::uniform(1.5, 400);
    const auto report = classify(spec, grid, true);
    g.expect(report.case_label == CaseLabel::case_iii,
             "full-rank noiseless-control instance labelled case_iii");
    const EreSolution sol = solve_ere(spec, grid);
    g.expect(sol.P1[0].rows() == 2, "case_iii solve completes");
  }

  if (g.ok) g.append("case_i / case_ii / case_iii all labelled and solvable");
  return g;
}

// 3. First-order convergence of the backward sweep, plus agreement with a
//    fourth-order reference at a fine grid.
Gate convergence_order() {
  Gate g;
  const GameSpec& spec = portfolio_spec();

  auto front = [&](int steps) {
    const EreSolution sol = solve_ere(spec, TimeGrid::uniform(10.0, steps));
    return std::make_pair(sol.P1[0](0, 0), sol.P2[0](0, 0));
  };
  const auto [p1_a, p2_a] = front(500);
  const auto [p1_b, p2_b] = front(1000);
  const auto [p1_c, p2_c] = front(2000);
  const double ratio1 = std::abs(p1_a - p1_b) / std::abs(p1_b - p1_c);
  const double ratio2 = std::abs(p2_a - p2_b) / std::abs(p2_b - p2_c);
  g.expect(ratio1 >= 1.7 && ratio1 <= 2.3,
           "leader refinement ratio in [1.7, 2.3] (" + fmt(ratio1) + ")");
  g.expect(ratio2 >= 1.7 && ratio2 <= 2.3,
           "follower refinement ratio in [1.7, 2.3] (" + fmt(ratio2) + ")");

  const auto [p1_fine, p2_fine] = front(100000);
  const auto [p1_ref, p2_ref] = slqg::testing::rk4_reference_ere(spec, 200);
  const double err1 = std::abs(p1_fine - p1_ref(0, 0));
  const double err2 = std::abs(p2_fine - p2_ref(0, 0));
  g.expect(err2 <= 1e-5, "P2(0) vs fourth-order reference (" + fmt(err2) + ")");
  g.expect(err1 <= 1e-5, "P1(0) vs fourth-order reference (" + fmt(err1) + ")");

  if (g.ok) {
    g.append("ratios " + fmt(ratio1) + "/" + fmt(ratio2) + ", reference gaps " +
             fmt(err1) + "/" + fmt(err2));
  }
  return g;
}

// 4. Leader gain spikes never pay off, and the short-window difference
//    quotient matches the predicted curvature term.
Gate spike_stationarity() {
  Gate g;
  const GameSpec& spec = portfolio_spec();
  const TimeGrid grid = TimeGrid::uniform(10.0, 4000);
  const EreSolution sol = solve_ere(spec, grid);

  CounterStream rng(20260815, 4);
  double worst_quotient = 0.0;
  bool all_pass = true;
  for (int trial = 0; trial < 20; ++trial) {
    PerturbationSpec pert;
    pert.t_index = static_cast<int>(rng.next_index(3995));
    pert.eps_steps = 1 + static_cast<int>(rng.next_index(5));
    pert.V = sc(rng.next_uniform(-1.5, 1.5));
    pert.xi = Eigen::VectorXd::Constant(1, rng.next_uniform(-2.0, 2.0));
    const auto report = spike_test(pert, sol, spec, grid);
    all_pass = all_pass && report.pass;
    worst_quotient = std::min(worst_quotient, report.first_order_quotient);
  }
  g.expect(all_pass, "20 randomized spikes nonnegative to tolerance");

  PerturbationSpec pert;
  pert.t_index = 2000;
  pert.eps_steps = 1;
  pert.V = sc(1.0);
  pert.xi = Eigen::VectorXd::Constant(1, 2.0);
  const auto report = spike_test(pert, sol, spec, grid);
  g.expect(report.predicted_second_order > 0.0, "predicted curvature positive");
  const double rel =
      std::abs(report.first_order_quotient / report.predicted_second_order - 1.0);
  g.expect(rel <= 0.10,
           "one-step quotient within 10% of prediction (" + fmt(rel) + ")");

  if (g.ok) {
    g.append("worst quotient " + fmt(worst_quotient) + ", curvature match " +
             fmt(rel));
  }
  return g;
}

// 5. Randomized feedback deviations on both sides of the equilibrium.
Gate feedback_deviations() {
  Gate g;
  const auto report = feedback_stackelberg_check(
      portfolio_solution(), portfolio_spec(), portfolio_grid(), 100, 42);
  g.expect(report.follower_line.pass && report.follower_line.worst_margin >= -1e-9,
           "100 follower deviations never reduce the follower cost");
  g.expect(report.leader_line.pass && report.leader_line.worst_margin >= -1e-9,
           "100 leader deviations never reduce the leader cost");
  g.expect(report.pass, "combined check passes");
  if (g.ok) {
    g.append("worst margins " + fmt(report.follower_line.worst_margin) + " / " +
             fmt(report.leader_line.worst_margin));
  }
  return g;
}

// 6. Monte Carlo costs agree with the quadratic values, in both the canonical
//    and the doubled application convention.
Gate monte_carlo_consistency() {
  Gate g;
  const GameSpec& spec = portfolio_spec();
  const TimeGrid& grid = portfolio_grid();
  const EreSolution& sol = portfolio_solution();

  GainSchedule gains;
  gains.grid = grid;
  gains.theta1 = sol.theta1_bar;
  gains.theta2 = sol.theta2_star;

  const double xi0 = portfolio_shifted_x0();
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, xi0);
  const PathEnsemble ensemble = simulate(gains, x0, spec, grid, 10000, 42);

  const CostEstimate j1 = estimate_cost(ensemble, spec, Player::leader);
  const CostEstimate j2 = estimate_cost(ensemble, spec, Player::follower);
  const double v1 = 0.5 * sol.P1[0](0, 0) * xi0 * xi0;
  const double v2 = 0.5 * sol.P2[0](0, 0) * xi0 * xi0;
  const double z1 = std::abs(j1.mean - v1) / j1.std_error;
  const double z2 = std::abs(j2.mean - v2) / j2.std_error;
  g.expect(z1 <= 3.0, "leader cost within 3 SE (" + fmt(z1) + ")");
  g.expect(z2 <= 3.0, "follower cost within 3 SE (" + fmt(z2) + ")");

  // The portfolio application drops the 1/2 factor, so its follower value is
  // P2(0) xi^2 and the matching estimator is twice the canonical one.
  const double z2_app =
      std::abs(2.0 * j2.mean - sol.P2[0](0, 0) * xi0 * xi0) /
      (2.0 * j2.std_error);
  g.expect(z2_app <= 3.0,
           "application-convention follower cost within 3 SE (" + fmt(z2_app) + ")");

  if (g.ok) g.append("z-scores " + fmt(z1) + ", " + fmt(z2) + ", " + fmt(z2_app));
  return g;
}

// 7. With the follower stripped out, the leader equation must collapse to the
//    one-player Riccati equation, reimplemented here from scratch.
Gate one_player_reduction() {
  Gate g;

  auto one_player_p0 = [](double A, double C, double B1, double D1, double Q1,
                          double R1, double G1, double T, int steps) {
    double p = G1;
    const double dt = T / steps;
    for (int i = 0; i < steps; ++i) {
      const double gain_num = B1 * p + D1 * p * C;
      const double metric = R1 + D1 * p * D1;
      p += dt * (2.0 * A * p + C * p * C + Q1 - gain_num * gain_num / metric);
    }
    return p;
  };

  CounterStream rng(7, 77);
  double worst = 0.0;
  bool zeros_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    const double A = rng.next_uniform(-1.0, 1.0);
    const double C = rng.next_uniform(-1.0, 1.0);
    const double B1 = rng.next_uniform(-1.0, 1.0);
    const double D1 = rng.next_uniform(-1.0, 1.0);
    const double Q1 = rng.next_uniform(0.0, 2.0);
    const double G1 = rng.next_uniform(0.0, 2.0);
    const double R1 = rng.next_uniform(0.1, 2.0);

    const GameSpec spec = scalar_spec(A, C, B1, D1, 0.0, 0.0, Q1, 0.0, R1, 1.0,
                                      G1, 0.0, 1.0, 0.05);
    const TimeGrid grid = TimeGrid::uniform(1.0, 10000);
    const EreSolution sol = solve_ere(spec, grid);
    const double oracle = one_player_p0(A, C, B1, D1, Q1, R1, G1, 1.0, 10000);
    worst = std::max(worst, std::abs(sol.P1[0](0, 0) - oracle));
    zeros_ok = zeros_ok && sol.P2[0](0, 0) == 0.0;
  }
  g.expect(worst <= 1e-6,
           "20 instances match the one-player solution (worst " + fmt(worst) + ")");
  g.expect(zeros_ok, "follower value identically zero");
  if (g.ok) g.append("worst gap " + fmt(worst));
  return g;
}

// 8. Open-loop optimality system: tight boundary conditions, visible control
//    drift after an interior restart, and exact zero from a zero start.
Gate open_loop_restart_drift() {
  Gate g;
  const Example11Spec spec;
  const TimeGrid grid = TimeGrid::uniform(1.0, 1000);

  const TpbvpSolution sol = solve_open_loop_fbsde(spec, grid);
  g.expect(sol.boundary_residual <= 1e-8,
           "boundary residual (" + fmt(sol.boundary_residual) + ")");

  const RestartReport report = restart_experiment(spec, grid, 500);
  g.expect(std::abs(report.y_at_restart) > 1e-3,
           "auxiliary state visible at the restart time");
  g.expect(report.u_deviation_sup > 1e-3,
           "leader control drifts after the restart");

  Example11Spec zero = spec;
  zero.x0 = 0.0;
  const TpbvpSolution sol0 = solve_open_loop_fbsde(zero, grid);
  double sup = 0.0;
  for (int i = 0; i <= grid.N; ++i) {
    sup = std::max({sup, std::abs(sol0.x_star[i]), std::abs(sol0.y_star[i]),
                    std::abs(sol0.p1_star[i]), std::abs(sol0.p2_star[i]),
                    std::abs(sol0.u_star[i]), std::abs(sol0.v_star[i])});
  }
  g.expect(sup == 0.0 && sol0.boundary_residual == 0.0,
           "zero initial state reproduces the zero solution exactly");

  if (g.ok) {
    g.append("residual " + fmt(sol.boundary_residual) + ", restart drift " +
             fmt(report.u_deviation_sup) + ", y(t~) " +
             fmt(report.y_at_restart));
  }
  return g;
}

// 9. Bit-identical simulation artifacts for every worker count.
Gate parallel_determinism() {
  Gate g;
  const GameSpec& spec = portfolio_spec();
  const TimeGrid grid = TimeGrid::uniform(10.0, 500);
  const EreSolution sol = solve_ere(spec, grid);

  GainSchedule gains;
  gains.grid = grid;
  gains.theta1 = sol.theta1_bar;
  gains.theta2 = sol.theta2_star;
  const Eigen::VectorXd x0 =
      Eigen::VectorXd::Constant(1, portfolio_shifted_x0());

  std::vector<std::string> outputs;
  for (int workers : {1, 2, 5, 8, 0}) {
    const PathEnsemble ensemble =
        simulate(gains, x0, spec, grid, 64, 7, workers);
    std::ostringstream os;
    write_ensemble_csv(os, ensemble, spec);
    outputs.push_back(os.str());
  }
  bool identical = true;
  for (std::size_t i = 1; i < outputs.size(); ++i) {
    identical = identical && outputs[i] == outputs[0];
  }
  g.expect(identical && !outputs[0].empty(),
           "ensemble files identical across 1/2/5/8/auto workers");
  if (g.ok) g.append("5 worker counts, identical 64-path files");
  return g;
}

}  // namespace

int main() {
  using Criterion = Gate (*)();
  const std::pair<const char*, Criterion> criteria[] = {
      {"golden portfolio run", &golden_portfolio_run},
      {"well-posedness classification", &wellposedness_classes},
      {"convergence order", &convergence_order},
      {"spike stationarity", &spike_stationarity},
      {"feedback deviations", &feedback_deviations},
      {"monte carlo consistency", &monte_carlo_consistency},
      {"one-player reduction", &one_player_reduction},
      {"open-loop restart drift", &open_loop_restart_drift},
      {"parallel determinism", &parallel_determinism},
  };

  int failures = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Gate g;
    try {
      g = run();
    } catch (const std::exception& e) {
      g.ok = false;
      g.append(std::string("unexpected exception: ") + e.what());
    }
    std::printf("[%s] %d. %s%s%s\n", g.ok ? "PASS" : "FAIL", index, name,
                g.detail.empty() ? "" : ": ", g.detail.c_str());
    std::fflush(stdout);
    if (!g.ok) ++failures;
  }

  if (failures > 0) {
    std::printf("%d of 9 acceptance criteria failed\n", failures);
    return 1;
  }
  std::printf("all 9 acceptance criteria passed\n");
  return 0;
}
