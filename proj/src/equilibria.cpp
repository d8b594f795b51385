#include "slqg/equilibria.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "slqg/rng.hpp"

namespace slqg {

namespace {

constexpr double kSpikeTol = 1e-6;
constexpr double kDeviationTol = 1e-9;

Eigen::MatrixXd draw_bounded_gain(CounterStream& rng, int rows, int cols) {
  Eigen::MatrixXd D(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) D(i, j) = rng.next_uniform(-1.0, 1.0);
  const double op_norm =
      Eigen::JacobiSVD<Eigen::MatrixXd>(D).singularValues()(0);
  if (op_norm > 1.0) D /= op_norm;
  return D;
}

Eigen::VectorXd draw_unit_box(CounterStream& rng, int n) {
  Eigen::VectorXd xi(n);
  for (int i = 0; i < n; ++i) xi(i) = rng.next_uniform(-1.0, 1.0);
  return xi;
}

double quadratic_value(const std::vector<Eigen::MatrixXd>& Pi, int t_index,
                       const Eigen::VectorXd& xi) {
  return 0.5 * xi.dot(Pi[t_index] * xi);
}

}  // namespace

double leader_value_of_gain(const std::vector<Eigen::MatrixXd>& theta1,
                            int t_index, const Eigen::VectorXd& xi,
                            const GameSpec& spec, const TimeGrid& grid) {
  if (t_index < 0 || t_index > grid.N) {
    throw Error(ErrorCategory::validation, "t_index out of range");
  }
  const CoefficientTable table = sample_coefficients(spec, grid);
  const std::vector<Eigen::MatrixXd> P2 =
      solve_follower_riccati(theta1, spec, grid);

  GainSchedule gains;
  gains.grid = grid;
  gains.theta1 = theta1;
  std::vector<Eigen::MatrixXd> theta2(grid.N + 1);
  for (int j = 0; j <= grid.N; ++j) {
    theta2[j] = theta2_star(table[j], theta1[j], P2[j], j);
  }
  gains.theta2 = std::move(theta2);

  const std::vector<Eigen::MatrixXd> Pi =
      solve_lyapunov_value(gains, Player::leader, spec, grid);
  return quadratic_value(Pi, t_index, xi);
}

EquilibriumTestReport spike_test(const PerturbationSpec& pert,
                                 const EreSolution& sol, const GameSpec& spec,
                                 const TimeGrid& grid) {
  if (pert.t_index < 0 || pert.t_index >= grid.N) {
    throw Error(ErrorCategory::validation, "spike t_index out of range");
  }
  if (pert.eps_steps < 1 || pert.t_index + pert.eps_steps > grid.N) {
    throw Error(ErrorCategory::validation, "spike eps_steps out of range");
  }
  if (pert.V.rows() != spec.dims.m1 || pert.V.cols() != spec.dims.n ||
      pert.xi.size() != spec.dims.n) {
    throw Error(ErrorCategory::validation, "spike V or xi has wrong shape");
  }

  std::vector<Eigen::MatrixXd> perturbed = sol.theta1_bar;
  for (int j = pert.t_index; j <= pert.t_index + pert.eps_steps; ++j) {
    perturbed[j] += pert.V;
  }
  const double eps = pert.eps_steps * grid.dt();
  const double j_base = leader_value_of_gain(sol.theta1_bar, pert.t_index,
                                             pert.xi, spec, grid);
  const double j_pert =
      leader_value_of_gain(perturbed, pert.t_index, pert.xi, spec, grid);

  EquilibriumTestReport rep;
  rep.first_order_quotient = (j_pert - j_base) / eps;

  const CoefficientTable table = sample_coefficients(spec, grid);
  const CoefficientSet& c = table[pert.t_index];
  const NotationBlock nb = notation_block(c, sol.theta1_bar[pert.t_index],
                                          sol.P2[pert.t_index], pert.t_index);
  const Eigen::VectorXd w = pert.V * pert.xi;
  const Eigen::MatrixXd metric = symmetrize(
      c.R1 + nb.bD.transpose() * sol.P1[pert.t_index] * nb.bD);
  rep.predicted_second_order = 0.5 * w.dot(metric * w);
  rep.pass = rep.first_order_quotient >= -kSpikeTol * (1.0 + std::abs(j_base));
  return rep;
}

DeviationReport follower_optimality_test(
    const std::vector<Eigen::MatrixXd>& theta1, int trials, std::uint64_t seed,
    const GameSpec& spec, const TimeGrid& grid) {
  const CoefficientTable table = sample_coefficients(spec, grid);
  const std::vector<Eigen::MatrixXd> P2 =
      solve_follower_riccati(theta1, spec, grid);
  std::vector<Eigen::MatrixXd> best(grid.N + 1);
  for (int j = 0; j <= grid.N; ++j) {
    best[j] = theta2_star(table[j], theta1[j], P2[j], j);
  }

  GainSchedule opt;
  opt.grid = grid;
  opt.theta1 = theta1;
  opt.theta2 = best;
  const std::vector<Eigen::MatrixXd> Pi_opt =
      solve_lyapunov_value(opt, Player::follower, spec, grid);

  DeviationReport rep;
  rep.trials = trials;
  rep.tested_class =
      "follower deviations: best-response gain plus a constant matrix of "
      "operator norm <= 1, applied on the whole horizon; costs are exact "
      "quadratic values (no sampling). Nothing outside linear feedback is "
      "tested.";
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.pass = true;

  CounterStream rng(seed, /*stream=*/1);
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXd D =
        draw_bounded_gain(rng, spec.dims.m2, spec.dims.n);
    const Eigen::VectorXd xi = draw_unit_box(rng, spec.dims.n);
    const int t_index = static_cast<int>(rng.next_index(grid.N));

    GainSchedule dev = opt;
    for (int j = 0; j <= grid.N; ++j) (*dev.theta2)[j] = best[j] + D;
    const std::vector<Eigen::MatrixXd> Pi_dev =
        solve_lyapunov_value(dev, Player::follower, spec, grid);

    const double margin = quadratic_value(Pi_dev, t_index, xi) -
                          quadratic_value(Pi_opt, t_index, xi);
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -kDeviationTol) rep.pass = false;
  }
  if (trials == 0) rep.worst_margin = 0.0;
  return rep;
}

StackelbergCheckReport feedback_stackelberg_check(const EreSolution& sol,
                                                  const GameSpec& spec,
                                                  const TimeGrid& grid,
                                                  int trials,
                                                  std::uint64_t seed) {
  StackelbergCheckReport rep;
  rep.follower_line =
      follower_optimality_test(sol.theta1_bar, trials, seed, spec, grid);

  const CoefficientTable table = sample_coefficients(spec, grid);

  GainSchedule eq;
  eq.grid = grid;
  eq.theta1 = sol.theta1_bar;
  eq.theta2 = sol.theta2_star;
  const std::vector<Eigen::MatrixXd> Pi_eq =
      solve_lyapunov_value(eq, Player::leader, spec, grid);

  DeviationReport& lead = rep.leader_line;
  lead.trials = trials;
  lead.tested_class =
      "leader deviations: equilibrium gain plus a constant matrix of operator "
      "norm <= 1, applied on the whole horizon, with the follower responding "
      "through its announced equilibrium reaction rule (response gain built "
      "from the equilibrium follower value matrix); costs are exact quadratic "
      "values (no sampling). Nothing outside linear feedback is tested.";
  lead.worst_margin = std::numeric_limits<double>::infinity();
  lead.pass = true;

  CounterStream rng(seed, /*stream=*/2);
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXd D =
        draw_bounded_gain(rng, spec.dims.m1, spec.dims.n);
    const Eigen::VectorXd xi = draw_unit_box(rng, spec.dims.n);
    const int t_index = static_cast<int>(rng.next_index(grid.N));

    GainSchedule dev;
    dev.grid = grid;
    dev.theta1.resize(grid.N + 1);
    std::vector<Eigen::MatrixXd> resp(grid.N + 1);
    for (int j = 0; j <= grid.N; ++j) {
      dev.theta1[j] = sol.theta1_bar[j] + D;
      resp[j] = theta2_star(table[j], dev.theta1[j], sol.P2[j], j);
    }
    dev.theta2 = std::move(resp);
    const std::vector<Eigen::MatrixXd> Pi_dev =
        solve_lyapunov_value(dev, Player::leader, spec, grid);

    const double margin = quadratic_value(Pi_dev, t_index, xi) -
                          quadratic_value(Pi_eq, t_index, xi);
    lead.worst_margin = std::min(lead.worst_margin, margin);
    if (margin < -kDeviationTol) lead.pass = false;
  }
  if (trials == 0) lead.worst_margin = 0.0;

  rep.pass = rep.follower_line.pass && lead.pass;
  return rep;
}

}  // namespace slqg
