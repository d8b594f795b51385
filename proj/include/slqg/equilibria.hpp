#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "slqg/riccati.hpp"

namespace slqg {

// Leader gain spike on [t, t + eps]: theta1 + V on the nodes covering
// eps_steps grid steps starting at t_index, evaluated from state xi at t.
struct PerturbationSpec {
  int t_index = 0;
  int eps_steps = 1;  // 1 <= eps_steps <= N - t_index
  Eigen::MatrixXd V;  // m1 x n
  Eigen::VectorXd xi; // n
};

struct EquilibriumTestReport {
  double first_order_quotient = 0;    // (J(perturbed) - J(base)) / eps
  double predicted_second_order = 0;  // 0.5 <(R1 + bD'P1 bD) V xi, V xi> at t
  bool pass = false;
};

// Exact leader cost of an announced gain schedule with the follower fully
// best-responding: solves the follower Riccati under theta1, forms the
// response gains, then evaluates the leader's quadratic value at (t, xi).
double leader_value_of_gain(const std::vector<Eigen::MatrixXd>& theta1,
                            int t_index, const Eigen::VectorXd& xi,
                            const GameSpec& spec, const TimeGrid& grid);

// Finite-eps difference quotient of the leader cost under a gain spike,
// against the predicted second-order limit. At an equilibrium solution the
// quotient is nonnegative up to tolerance and converges to the prediction as
// eps -> 0.
EquilibriumTestReport spike_test(const PerturbationSpec& pert,
                                 const EreSolution& sol, const GameSpec& spec,
                                 const TimeGrid& grid);

struct DeviationReport {
  bool pass = false;
  double worst_margin = 0;  // min over trials of J(deviation) - J(candidate)
  int trials = 0;
  std::string tested_class;  // human-readable deviation class description
};

// Draws `trials` random bounded gain deviations for the follower (operator
// norm <= 1, uniform entries), random unit-box initial states and random
// evaluation nodes, and checks that no deviation beats the best response
// against theta1.
// Costs are exact quadratic values, never Monte Carlo.
DeviationReport follower_optimality_test(
    const std::vector<Eigen::MatrixXd>& theta1, int trials, std::uint64_t seed,
    const GameSpec& spec, const TimeGrid& grid);

struct StackelbergCheckReport {
  DeviationReport follower_line;  // follower deviations at theta1 = theta1_bar
  DeviationReport leader_line;    // leader deviations, follower reacting
  bool pass = false;
};

// Verifies both equilibrium inequalities over randomized linear-feedback
// deviations. Follower line: no gain deviation beats the best response.
// Leader line: no bounded gain deviation lowers the leader's cost when the
// follower responds through its announced equilibrium reaction rule
// v = -(Kx + Ku u) x  (equivalently, response gain theta2_star(theta1', P2)
// with the equilibrium P2). The reports name the tested deviation classes;
// nothing outside linear feedback is claimed.
StackelbergCheckReport feedback_stackelberg_check(const EreSolution& sol,
                                                  const GameSpec& spec,
                                                  const TimeGrid& grid,
                                                  int trials,
                                                  std::uint64_t seed);

}  // namespace slqg
