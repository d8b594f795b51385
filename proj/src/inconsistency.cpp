#include "slqg/inconsistency.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "slqg/errors.hpp"

namespace slqg {

namespace {

void validate(const Example11Spec& s) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      throw Error(ErrorCategory::validation,
                  std::string(name) + " must be positive");
    }
  };
  positive(s.R1, "R1");
  positive(s.R2, "R2");
  positive(s.G1, "G1");
  positive(s.G2, "G2");
  positive(s.Q1, "Q1");
  positive(s.T, "T");
  if (s.B1 == 0.0 || s.B2 == 0.0) {
    throw Error(ErrorCategory::validation, "B1 and B2 must be nonzero");
  }
  if (!std::isfinite(s.A) || !std::isfinite(s.Q2) || !std::isfinite(s.x0)) {
    throw Error(ErrorCategory::validation, "coefficients must be finite");
  }
  // x0 = 0 is allowed; it just yields the zero solution.
}

// System matrix for z = (x, p2, y, p1).
Eigen::Matrix4d system_matrix(const Example11Spec& s) {
  const double b1 = s.B1 * s.B1 / s.R1;
  const double b2 = s.B2 * s.B2 / s.R2;
  Eigen::Matrix4d M;
  M << s.A, -b2, 0, -b1,
      -s.Q2, -s.A, 0, 0,
      0, 0, s.A, b2,
      -s.Q1, 0, s.Q2, -s.A;
  return M;
}

// One classical fourth-order step of z' = M z is linear in z, so the whole
// step collapses to a constant matrix reused at every step.
Eigen::Matrix4d rk4_step_matrix(const Eigen::Matrix4d& M, double h) {
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d hM = h * M;
  return I + hM + (hM * hM) / 2.0 + (hM * hM * hM) / 6.0 +
         (hM * hM * hM * hM) / 24.0;
}

}  // namespace

TpbvpSolution solve_open_loop_fbsde(const Example11Spec& spec,
                                    const TimeGrid& grid) {
  validate(spec);
  if (std::abs(grid.T - spec.T) > 1e-12 * (1.0 + std::abs(spec.T))) {
    throw Error(ErrorCategory::validation,
                "grid horizon does not match the problem horizon");
  }

  const int N = grid.N;
  const Eigen::Matrix4d M = system_matrix(spec);
  const Eigen::Matrix4d S = rk4_step_matrix(M, grid.dt());

  // Fundamental matrix over the whole horizon.
  Eigen::Matrix4d Phi = Eigen::Matrix4d::Identity();
  for (int i = 0; i < N; ++i) Phi = S * Phi;

  // Terminal conditions as rows against z(T) = Phi z(0):
  //   p2(T) - G2 x(T) = 0,  p1(T) + G2 y(T) - G1 x(T) = 0.
  const Eigen::RowVector4d r1 = Phi.row(1) - spec.G2 * Phi.row(0);
  const Eigen::RowVector4d r2 =
      Phi.row(3) + spec.G2 * Phi.row(2) - spec.G1 * Phi.row(0);

  Eigen::Matrix2d shoot;
  shoot << r1(1), r1(3), r2(1), r2(3);
  Eigen::Vector2d rhs(-r1(0) * spec.x0, -r2(0) * spec.x0);
  const double det = shoot.determinant();
  if (std::abs(det) < 1e-14 * (1.0 + shoot.norm() * shoot.norm())) {
    throw Error(ErrorCategory::singularity,
                "shooting matrix for the boundary problem is singular");
  }
  const Eigen::Vector2d ab = shoot.fullPivLu().solve(rhs);

  TpbvpSolution sol;
  sol.grid = grid;
  sol.x_star.resize(N + 1);
  sol.p2_star.resize(N + 1);
  sol.y_star.resize(N + 1);
  sol.p1_star.resize(N + 1);
  sol.u_star.resize(N + 1);
  sol.v_star.resize(N + 1);

  Eigen::Vector4d z(spec.x0, ab(0), 0.0, ab(1));
  for (int i = 0; i <= N; ++i) {
    sol.x_star[i] = z(0);
    sol.p2_star[i] = z(1);
    sol.y_star[i] = z(2);
    sol.p1_star[i] = z(3);
    sol.u_star[i] = -(spec.B1 / spec.R1) * z(3);
    sol.v_star[i] = -(spec.B2 / spec.R2) * z(1);
    if (i < N) z = S * z;
  }

  const double xT = sol.x_star[N], yT = sol.y_star[N];
  const double res_p2 = std::abs(sol.p2_star[N] - spec.G2 * xT);
  const double res_p1 =
      std::abs(sol.p1_star[N] + spec.G2 * yT - spec.G1 * xT);
  sol.boundary_residual = std::max({std::abs(sol.x_star[0] - spec.x0),
                                    std::abs(sol.y_star[0]), res_p2, res_p1});
  return sol;
}

RestartReport restart_experiment(const Example11Spec& spec,
                                 const TimeGrid& grid, int t_tilde_index) {
  if (t_tilde_index <= 0 || t_tilde_index >= grid.N) {
    throw Error(ErrorCategory::validation,
                "restart index must be interior to the grid");
  }
  const TpbvpSolution original = solve_open_loop_fbsde(spec, grid);

  const double t_tilde = grid.node(t_tilde_index);
  Example11Spec tail = spec;
  tail.T = grid.T - t_tilde;
  tail.x0 = original.x_star[t_tilde_index];
  const TimeGrid tail_grid = TimeGrid::uniform(tail.T, grid.N - t_tilde_index);

  RestartReport rep;
  rep.y_at_restart = std::abs(original.y_star[t_tilde_index]);
  rep.restarted = solve_open_loop_fbsde(tail, tail_grid);

  double du = 0.0, dv = 0.0;
  for (int k = 0; k <= tail_grid.N; ++k) {
    du = std::max(du, std::abs(rep.restarted.u_star[k] -
                               original.u_star[t_tilde_index + k]));
    dv = std::max(dv, std::abs(rep.restarted.v_star[k] -
                               original.v_star[t_tilde_index + k]));
  }
  rep.u_deviation_sup = du;
  rep.v_deviation_sup = dv;
  return rep;
}

}  // namespace slqg
