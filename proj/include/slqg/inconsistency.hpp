#pragma once

#include <vector>

#include "slqg/game.hpp"

namespace slqg {

// Scalar open-loop Stackelberg game with constant coefficients and no state
// noise feed-through (C = D1 = D2 = 0). Its optimality system is a linear
// 4-component two-point boundary value problem in z = (x, p2, y, p1):
//
//   x'  =  A x - B1^2/R1 p1 - B2^2/R2 p2        x(0)  = x0
//   p2' = -A p2 - Q2 x                          y(0)  = 0
//   y'  =  A y + B2^2/R2 p1                     p1(T) = -G2 y(T) + G1 x(T)
//   p1' = -A p1 + Q2 y - Q1 x                   p2(T) =  G2 x(T)
//
// with controls u = -B1/R1 p1, v = -B2/R2 p2. Re-solving from an interior
// time with the auxiliary state y reset to zero changes the controls:
// the open-loop solution is not time-consistent.
struct Example11Spec {
  double A = 0, B1 = 1, B2 = 1;
  double Q1 = 1, Q2 = 1, R1 = 1, R2 = 1, G1 = 1, G2 = 1;
  double T = 1;
  double x0 = 1;
};

struct TpbvpSolution {
  TimeGrid grid;
  std::vector<double> x_star, p2_star, y_star, p1_star;
  std::vector<double> u_star, v_star;
  double boundary_residual = 0;  // max violation of the four conditions
};

// Shooting solve: the fundamental matrix of the linear system is propagated
// with a classical fourth-order one-step method, the two unknown initial
// costates come from a 2x2 linear solve against the terminal conditions.
// Throws Error(validation) on parameter violations, Error(singularity) if
// the shooting matrix degenerates.
TpbvpSolution solve_open_loop_fbsde(const Example11Spec& spec,
                                    const TimeGrid& grid);

struct RestartReport {
  double y_at_restart = 0;          // |y*(t~)| in the original solution
  double u_deviation_sup = 0;       // sup_i |u~*(t_i) - u*(t_i)| on [t~, T]
  double v_deviation_sup = 0;
  TpbvpSolution restarted;          // solution of the restarted problem
};

// Re-solves the problem on [t~, T] from the original x*(t~) with y reset to
// zero (as a fresh solve would), and reports how far the restarted controls
// drift from the original ones.
RestartReport restart_experiment(const Example11Spec& spec,
                                 const TimeGrid& grid, int t_tilde_index);

}  // namespace slqg
