#include "slqg/riccati.hpp"

#include <sstream>

namespace slqg {

namespace {

constexpr double kPsdMonitorFloor = -1e-8;

// Shared core of the notation-block computation. K is the response offset
// F (B2' P2 + D2' P2 C); bB and bD do not depend on theta1.
struct FollowerCore {
  Eigen::MatrixXd F;   // (R2 + D2' P2 D2)^{-1}
  Eigen::MatrixXd K;   // F (B2' P2 + D2' P2 C)
  Eigen::MatrixXd Ku;  // F D2' P2 D1
  double metric_min_eig = 0;
};

FollowerCore follower_core(const CoefficientSet& c, const Eigen::MatrixXd& P2,
                           int node_index) {
  FollowerCore out;
  const Eigen::MatrixXd metric = c.R2 + c.D2.transpose() * P2 * c.D2;
  SpdInverse inv = spd_inverse(symmetrize(metric), "R2 + D2'P2D2", node_index);
  out.F = std::move(inv.inverse);
  out.metric_min_eig = inv.min_eig;
  out.K = out.F * (c.B2.transpose() * P2 + c.D2.transpose() * P2 * c.C);
  out.Ku = out.F * (c.D2.transpose() * P2 * c.D1);
  return out;
}

void check_psd_monitor(const Eigen::MatrixXd& P, const char* name, int node) {
  const double eig = min_eigenvalue(P);
  if (!(eig >= kPsdMonitorFloor)) {
    std::ostringstream msg;
    msg << name << " left the positive-semidefinite region at node " << node
        << " (min eigenvalue " << eig << ")";
    throw Error(ErrorCategory::monitor, msg.str(), node);
  }
}

Eigen::MatrixXd lyapunov_rhs(const CoefficientSet& c, const Eigen::MatrixXd& Pi,
                             const Eigen::MatrixXd& th1,
                             const Eigen::MatrixXd& th2, Player player) {
  const Eigen::MatrixXd Acl = c.A + c.B1 * th1 + c.B2 * th2;
  const Eigen::MatrixXd Ccl = c.C + c.D1 * th1 + c.D2 * th2;
  Eigen::MatrixXd q;
  if (player == Player::leader) {
    q = c.Q1 + th1.transpose() * c.R1 * th1;
  } else {
    q = c.Q2 + th2.transpose() * c.R2 * th2;
  }
  return symmetrize(Acl.transpose() * Pi + Pi * Acl +
                    Ccl.transpose() * Pi * Ccl + q);
}

}  // namespace

NotationBlock notation_block(const CoefficientSet& c,
                             const Eigen::MatrixXd& theta1,
                             const Eigen::MatrixXd& P2, int node_index) {
  const FollowerCore core = follower_core(c, P2, node_index);
  NotationBlock nb;
  nb.bB = c.B1 - c.B2 * core.Ku;
  nb.bD = c.D1 - c.D2 * core.Ku;
  nb.bA = c.A - c.B2 * core.K + nb.bB * theta1;
  nb.bC = c.C - c.D2 * core.K + nb.bD * theta1;
  nb.follower_inverse = core.F;
  nb.follower_metric_min_eig = core.metric_min_eig;
  return nb;
}

Eigen::MatrixXd theta2_star(const CoefficientSet& c,
                            const Eigen::MatrixXd& theta1,
                            const Eigen::MatrixXd& P2, int node_index) {
  const FollowerCore core = follower_core(c, P2, node_index);
  return -(core.K + core.Ku * theta1);
}

Eigen::MatrixXd theta1_bar(const CoefficientSet& c, const Eigen::MatrixXd& P1,
                           const Eigen::MatrixXd& P2, int node_index) {
  const FollowerCore core = follower_core(c, P2, node_index);
  const Eigen::MatrixXd bB = c.B1 - c.B2 * core.Ku;
  const Eigen::MatrixXd bD = c.D1 - c.D2 * core.Ku;
  const Eigen::MatrixXd metric =
      symmetrize(c.R1 + bD.transpose() * P1 * bD);
  SpdInverse inv = spd_inverse(metric, "R1 + bD'P1bD", node_index);
  // theta1 = -(R1 + bD'P1bD)^{-1} [bB'P1 + bD'P1(C - D2 K)]
  return -(inv.inverse *
           (bB.transpose() * P1 +
            bD.transpose() * P1 * (c.C - c.D2 * core.K)));
}

Eigen::MatrixXd rhs_P2(const CoefficientSet& c, const Eigen::MatrixXd& theta1,
                       const Eigen::MatrixXd& P2, int node_index) {
  const FollowerCore core = follower_core(c, P2, node_index);
  const Eigen::MatrixXd Ab = c.A + c.B1 * theta1;
  const Eigen::MatrixXd Cb = c.C + c.D1 * theta1;
  const Eigen::MatrixXd L =
      c.B2.transpose() * P2 + c.D2.transpose() * P2 * Cb;
  return symmetrize(Ab.transpose() * P2 + P2 * Ab +
                    Cb.transpose() * P2 * Cb + c.Q2 -
                    L.transpose() * core.F * L);
}

Eigen::MatrixXd rhs_P1(const CoefficientSet& c, const Eigen::MatrixXd& theta1,
                       const Eigen::MatrixXd& P1, const Eigen::MatrixXd& P2,
                       int node_index) {
  const NotationBlock nb = notation_block(c, theta1, P2, node_index);
  return symmetrize(nb.bA.transpose() * P1 + P1 * nb.bA +
                    nb.bC.transpose() * P1 * nb.bC + c.Q1 +
                    theta1.transpose() * c.R1 * theta1);
}

EreSolution solve_ere(const GameSpec& spec, const TimeGrid& grid) {
  const CoefficientTable table = sample_coefficients(spec, grid);
  const int N = grid.N;
  const double dt = grid.dt();

  EreSolution sol;
  sol.grid = grid;
  sol.P1.resize(N + 1);
  sol.P2.resize(N + 1);
  sol.theta1_bar.resize(N + 1);
  sol.theta2_star.resize(N + 1);
  sol.diagnostics.resize(N + 1);

  sol.P1[N] = spec.G1;
  sol.P2[N] = spec.G2;

  auto fill_node = [&](int j) {
    const CoefficientSet& c = table[j];
    sol.theta1_bar[j] = theta1_bar(c, sol.P1[j], sol.P2[j], j);
    sol.theta2_star[j] = theta2_star(c, sol.theta1_bar[j], sol.P2[j], j);

    NodeDiagnostics& d = sol.diagnostics[j];
    d.min_eig_P1 = min_eigenvalue(symmetrize(sol.P1[j]));
    d.min_eig_P2 = min_eigenvalue(symmetrize(sol.P2[j]));
    const NotationBlock nb = notation_block(c, sol.theta1_bar[j], sol.P2[j], j);
    d.min_eig_follower_metric = nb.follower_metric_min_eig;
    d.min_eig_leader_metric = min_eigenvalue(
        symmetrize(c.R1 + nb.bD.transpose() * sol.P1[j] * nb.bD));
    d.residual_norm = (c.R1 * sol.theta1_bar[j] +
                       nb.bB.transpose() * sol.P1[j] +
                       nb.bD.transpose() * sol.P1[j] * nb.bC)
                          .norm();
  };

  fill_node(N);
  for (int i = N; i >= 1; --i) {
    const CoefficientSet& c = table[i];
    // The derivative for the step ending at i-1 uses the gain at the right
    // node, which fill_node(i) has already stored.
    const Eigen::MatrixXd& th1 = sol.theta1_bar[i];
    const Eigen::MatrixXd dP1 = rhs_P1(c, th1, sol.P1[i], sol.P2[i], i);
    const Eigen::MatrixXd dP2 = rhs_P2(c, th1, sol.P2[i], i);
    sol.P1[i - 1] = symmetrize(sol.P1[i] + dt * dP1);
    sol.P2[i - 1] = symmetrize(sol.P2[i] + dt * dP2);
    check_psd_monitor(sol.P1[i - 1], "P1", i - 1);
    check_psd_monitor(sol.P2[i - 1], "P2", i - 1);
    fill_node(i - 1);
  }
  return sol;
}

std::vector<Eigen::MatrixXd> solve_follower_riccati(
    const std::vector<Eigen::MatrixXd>& theta1, const GameSpec& spec,
    const TimeGrid& grid) {
  if (static_cast<int>(theta1.size()) != grid.N + 1) {
    throw Error(ErrorCategory::validation,
                "leader gain schedule must have N+1 entries");
  }
  const CoefficientTable table = sample_coefficients(spec, grid);
  const double dt = grid.dt();
  std::vector<Eigen::MatrixXd> P2(grid.N + 1);
  P2[grid.N] = spec.G2;
  for (int i = grid.N; i >= 1; --i) {
    P2[i - 1] = symmetrize(P2[i] + dt * rhs_P2(table[i], theta1[i], P2[i], i));
    check_psd_monitor(P2[i - 1], "P2", i - 1);
  }
  return P2;
}

std::vector<Eigen::MatrixXd> solve_lyapunov_value(const GainSchedule& gains,
                                                  Player player,
                                                  const GameSpec& spec,
                                                  const TimeGrid& grid) {
  if (!gains.theta2.has_value()) {
    throw Error(ErrorCategory::validation,
                "value evaluation needs both gain arrays");
  }
  if (static_cast<int>(gains.theta1.size()) != grid.N + 1 ||
      static_cast<int>(gains.theta2->size()) != grid.N + 1) {
    throw Error(ErrorCategory::validation,
                "gain schedule must have N+1 entries");
  }
  const CoefficientTable table = sample_coefficients(spec, grid);
  const double dt = grid.dt();
  std::vector<Eigen::MatrixXd> Pi(grid.N + 1);
  Pi[grid.N] = player == Player::leader ? spec.G1 : spec.G2;
  for (int i = grid.N; i >= 1; --i) {
    const Eigen::MatrixXd rhs = lyapunov_rhs(table[i], Pi[i], gains.theta1[i],
                                             (*gains.theta2)[i], player);
    Pi[i - 1] = symmetrize(Pi[i] + dt * rhs);
    if (!Pi[i - 1].allFinite()) {
      throw Error(ErrorCategory::monitor,
                  "value sweep produced non-finite entries", i - 1);
    }
  }
  return Pi;
}

std::vector<double> equilibrium_residual(const EreSolution& sol,
                                         const GameSpec& spec) {
  const CoefficientTable table = sample_coefficients(spec, sol.grid);
  std::vector<double> out(sol.grid.N + 1);
  for (int j = 0; j <= sol.grid.N; ++j) {
    const CoefficientSet& c = table[j];
    const Eigen::MatrixXd& P1 = sol.P1[j];
    const Eigen::MatrixXd& P2 = sol.P2[j];
    const Eigen::MatrixXd& th1 = sol.theta1_bar[j];
    // Rebuilt from plain products; the factorized path is not reused.
    const Eigen::MatrixXd metric =
        symmetrize(c.R2 + c.D2.transpose() * P2 * c.D2);
    const Eigen::MatrixXd rhs =
        c.B2.transpose() * P2 + c.D2.transpose() * P2 * c.C;
    const Eigen::MatrixXd K = metric.ldlt().solve(rhs);
    const Eigen::MatrixXd Ku =
        metric.ldlt().solve(c.D2.transpose() * P2 * c.D1);
    const Eigen::MatrixXd bB = c.B1 - c.B2 * Ku;
    const Eigen::MatrixXd bD = c.D1 - c.D2 * Ku;
    const Eigen::MatrixXd bC = c.C - c.D2 * K + bD * th1;
    out[j] = (c.R1 * th1 + bB.transpose() * P1 + bD.transpose() * P1 * bC)
                 .norm();
  }
  return out;
}

}  // namespace slqg
