#pragma once

////////////////////////////////////////////////////////////////////////////////
//
// Core numerical engine for the two-player Stackelberg stochastic LQ game.
//
// The follower best-responds to an announced leader feedback u = Theta1 X
// through its own Riccati equation; the leader's equilibrium gain closes a
// coupled pair of backward matrix ODEs (the equilibrium Riccati system) in
// (P1, P2):
//
//   -dP2/dt = (A + B1 Th1)' P2 + P2 (A + B1 Th1)
//           + (C + D1 Th1)' P2 (C + D1 Th1) + Q2
//           - [P2 B2 + (C + D1 Th1)' P2 D2] F [B2' P2 + D2' P2 (C + D1 Th1)]
//   -dP1/dt = bA' P1 + P1 bA + bC' P1 bC + Q1 + Th1' R1 Th1
//
// with F = (R2 + D2' P2 D2)^{-1} and the shorthand matrices
//
//   bB = B1 - B2 F D2' P2 D1            bD = D1 - D2 F D2' P2 D1
//   bA = A - B2 F (B2' P2 + D2' P2 C) + bB Th1
//   bC = C - D2 F (B2' P2 + D2' P2 C) + bD Th1.
//
// The equilibrium leader gain solves the normal equation
//   R1 Th1 + bB' P1 + bD' P1 bC(Th1) = 0,
// i.e. Th1 = -(R1 + bD' P1 bD)^{-1} [bB' P1 + bD' P1 (C - D2 F (B2'P2 + D2'P2 C))],
// and the follower's best response is
//   Th2 = -F (B2' P2 + D2' P2 (C + D1 Th1)).
//
// Integration is an explicit first-order sweep backward from t = T: the
// derivative for the step ending at node i-1 is evaluated at the right node i
// (coefficients, P, and gains all taken at t_i), then
// P[i-1] = P[i] - dt * dP/dt, symmetrized. Exported gain arrays are
// node-consistent: theta[j] is computed from (P1[j], P2[j]), so the stored
// gains satisfy their normal equations exactly at every node, and the gain
// the sweep used for the step ending at i-1 is exactly theta[i].
//
// Inverses go through SPD eigendecompositions with a 1e-10 eigenvalue floor;
// P1 and P2 are monitored for positive semidefiniteness (floor -1e-8) after
// every step. A floor violation aborts the solve with the node index: the
// instance has left the region where the scheme is known to be meaningful.
//
////////////////////////////////////////////////////////////////////////////////

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "slqg/game.hpp"

namespace slqg {

enum class Player { leader = 1, follower = 2 };

// Shorthand matrices entering the leader-side equations; all functions of
// (Theta1, P2) at one node.
struct NotationBlock {
  Eigen::MatrixXd bB;                // n x m1
  Eigen::MatrixXd bD;                // n x m1
  Eigen::MatrixXd bA;                // n x n
  Eigen::MatrixXd bC;                // n x n
  Eigen::MatrixXd follower_inverse;  // (R2 + D2' P2 D2)^{-1}, m2 x m2
  double follower_metric_min_eig = 0;  // min eig of R2 + D2' P2 D2
};

NotationBlock notation_block(const CoefficientSet& c, const Eigen::MatrixXd& theta1,
                             const Eigen::MatrixXd& P2, int node_index = -1);

// Follower best-response gain to the announced leader gain.
Eigen::MatrixXd theta2_star(const CoefficientSet& c, const Eigen::MatrixXd& theta1,
                            const Eigen::MatrixXd& P2, int node_index = -1);

// Equilibrium leader gain at one node, given both value matrices.
Eigen::MatrixXd theta1_bar(const CoefficientSet& c, const Eigen::MatrixXd& P1,
                           const Eigen::MatrixXd& P2, int node_index = -1);

// Right-hand sides, returned as -dP/dt (positive along the backward sweep).
Eigen::MatrixXd rhs_P2(const CoefficientSet& c, const Eigen::MatrixXd& theta1,
                       const Eigen::MatrixXd& P2, int node_index = -1);
Eigen::MatrixXd rhs_P1(const CoefficientSet& c, const Eigen::MatrixXd& theta1,
                       const Eigen::MatrixXd& P1, const Eigen::MatrixXd& P2,
                       int node_index = -1);

struct NodeDiagnostics {
  double min_eig_P1 = 0;
  double min_eig_P2 = 0;
  double min_eig_follower_metric = 0;  // R2 + D2' P2 D2
  double min_eig_leader_metric = 0;    // R1 + bD' P1 bD
  double residual_norm = 0;            // leader normal-equation residual
};

struct EreSolution {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> P1, P2;                  // N+1 symmetric n x n
  std::vector<Eigen::MatrixXd> theta1_bar, theta2_star;  // N+1 gains
  std::vector<NodeDiagnostics> diagnostics;             // per node
};

// Fixed feedback gains per node. theta2 may be absent where an operation is
// defined to have the follower best-respond.
struct GainSchedule {
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> theta1;                 // N+1 of m1 x n
  std::optional<std::vector<Eigen::MatrixXd>> theta2;  // N+1 of m2 x n
};

// Backward sweep of the coupled equilibrium system. Throws Error(singularity)
// or Error(monitor) with the node index on a floor violation.
EreSolution solve_ere(const GameSpec& spec, const TimeGrid& grid);

// Follower Riccati under a fixed leader schedule (best response values only).
std::vector<Eigen::MatrixXd> solve_follower_riccati(
    const std::vector<Eigen::MatrixXd>& theta1, const GameSpec& spec,
    const TimeGrid& grid);

// Quadratic value of a fixed gain pair for the selected player's weights:
// backward sweep of  -dPi/dt = Acl' Pi + Pi Acl + Ccl' Pi Ccl + Q_k + Th_k' R_k Th_k
// with Acl = A + B1 Th1 + B2 Th2, Ccl = C + D1 Th1 + D2 Th2, Pi(T) = G_k.
// Value at (t_i, xi) is 0.5 * xi' Pi[i] xi.
std::vector<Eigen::MatrixXd> solve_lyapunov_value(const GainSchedule& gains,
                                                  Player player,
                                                  const GameSpec& spec,
                                                  const TimeGrid& grid);

// Leader normal-equation residual per node, recomputed from scratch (plain
// matrix products, no factorizations shared with the solve path).
std::vector<double> equilibrium_residual(const EreSolution& sol,
                                         const GameSpec& spec);

}  // namespace slqg
