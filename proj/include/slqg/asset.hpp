#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slqg/riccati.hpp"
#include "slqg/sim.hpp"

namespace slqg {

// Two-manager asset allocation: wealth follows
//   dX = [ r X + (mu1 - r) u1 + (mu2 - r) u2 ] ds + [ sigma1 u1 + sigma2 u2 ] dW
// and both managers steer X toward the target z at time T, penalizing their
// own risky exposure. Substituting the shifted wealth
// Xt(s) = X(s) - z exp(-r(T-s)) turns this into the homogeneous scalar game
// with A = r, C = 0, B_k = mu_k - r, D_k = R_k = sigma_k, Q_k = 0, G_k = 1.
struct AssetSpec {
  double x0 = 100.0;     // initial wealth
  double z = 200.0;      // terminal wealth target
  double r = 0.03;       // risk-free rate
  double mu1 = 0.08, mu2 = 0.10;      // risky drifts (leader, follower)
  double sigma1 = 0.15, sigma2 = 0.19;  // volatilities (> 0)
  double T = 10.0;

  static AssetSpec table2_defaults() { return AssetSpec{}; }
};

// Validation requires sigma_k > 0 and the target to be reachable-from-above,
// z >= x0 * exp(rT); pass allow_infeasible_target to explore anyway.
// Note on conventions: this application's cost carries no 1/2 factor, so its
// reported values are twice the solver's canonical quadratic values (the
// follower's value function is P2(t) * shifted_state^2).
GameSpec asset_to_game(const AssetSpec& asset,
                       bool allow_infeasible_target = false);

// Equilibrium dollar allocations at wealth X:
//   u_k = theta_k(t) * (X - z exp(-r(T-t))).
std::pair<double, double> shifted_controls(const EreSolution& sol,
                                           const AssetSpec& asset, int t_index,
                                           double X);

// Discounted target z * exp(-r (T - t_i)).
double discounted_target(const AssetSpec& asset, const TimeGrid& grid, int i);

struct FigureBundle {
  TimeGrid grid;
  EreSolution solution;
  PathEnsemble ensemble;  // shifted-state paths
  AssetSpec asset;

  // Reported wealth is the shifted path plus the discounted target.
  double wealth(int path, int node) const;
};

// Solves the game, simulates the shifted wealth process under the
// equilibrium gains, and packages the three result tables (value curves,
// wealth paths, control paths).
FigureBundle reproduce_figures(const AssetSpec& asset, const TimeGrid& grid,
                               int num_paths, std::uint64_t seed,
                               bool allow_infeasible_target = false);

}  // namespace slqg
