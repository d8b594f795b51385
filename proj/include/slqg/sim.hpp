#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "slqg/riccati.hpp"

namespace slqg {

// Euler-Maruyama sample paths of the closed-loop state
//   X[i+1] = X[i] + (A + B1 Th1 + B2 Th2) X[i] dt
//          + (C + D1 Th1 + D2 Th2) X[i] dW_i
// with coefficients and gains taken at the left node of each step.
// Storage is flat, path-major; use the accessors.
struct PathEnsemble {
  TimeGrid grid;
  int num_paths = 0;
  std::uint64_t seed = 0;
  int n = 0, m1 = 0, m2 = 0;
  std::vector<double> states;      // num_paths * (N+1) * n
  std::vector<double> controls_u;  // num_paths * (N+1) * m1
  std::vector<double> controls_v;  // num_paths * (N+1) * m2
  std::vector<double> increments;  // num_paths * N, each ~ Normal(0, dt)

  Eigen::Map<const Eigen::VectorXd> state(int path, int node) const {
    return {states.data() + (static_cast<std::size_t>(path) * (grid.N + 1) + node) * n,
            n};
  }
  Eigen::Map<const Eigen::VectorXd> control_u(int path, int node) const {
    return {controls_u.data() +
                (static_cast<std::size_t>(path) * (grid.N + 1) + node) * m1,
            m1};
  }
  Eigen::Map<const Eigen::VectorXd> control_v(int path, int node) const {
    return {controls_v.data() +
                (static_cast<std::size_t>(path) * (grid.N + 1) + node) * m2,
            m2};
  }
  double increment(int path, int step) const {
    return increments[static_cast<std::size_t>(path) * grid.N + step];
  }
};

struct CostEstimate {
  double mean = 0;
  double std_error = 0;  // sample std / sqrt(num_paths)
  int num_paths = 0;
  Player player = Player::leader;
};

// Simulates num_paths closed-loop paths from x0. Brownian increments come
// from the counter generator keyed by (seed, path, step); the result is
// independent of num_workers (0 = hardware concurrency). When gains.theta2 is
// absent the follower best-responds: its Riccati equation is solved under
// gains.theta1 and the response gains are filled in per node.
// Throws Error(simulation) with path/step context if a state goes non-finite.
PathEnsemble simulate(const GainSchedule& gains, const Eigen::VectorXd& x0,
                      const GameSpec& spec, const TimeGrid& grid,
                      int num_paths, std::uint64_t seed, int num_workers = 0);

// Left-rectangle quadrature of the running cost plus terminal cost,
//   0.5 * [ sum_i (X'Q_k X + ctrl'R_k ctrl) dt + X(T)'G_k X(T) ],
// averaged over paths. The reduction is a fixed-shape pairwise sum over path
// index, deterministic for any worker count.
CostEstimate estimate_cost(const PathEnsemble& ensemble, const GameSpec& spec,
                           Player player);

// Deterministic pairwise sum (exposed for reuse and testing).
double pairwise_sum(const double* data, std::size_t count);

}  // namespace slqg
