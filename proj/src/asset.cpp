#include "slqg/asset.hpp"

#include <cmath>

#include "slqg/errors.hpp"

namespace slqg {

GameSpec asset_to_game(const AssetSpec& asset, bool allow_infeasible_target) {
  if (!(asset.sigma1 > 0.0) || !(asset.sigma2 > 0.0)) {
    throw Error(ErrorCategory::validation, "volatilities must be positive");
  }
  if (!(asset.T > 0.0)) {
    throw Error(ErrorCategory::validation, "horizon must be positive");
  }
  const double grown = asset.x0 * std::exp(asset.r * asset.T);
  if (asset.z < grown && !allow_infeasible_target) {
    throw Error(ErrorCategory::validation,
                "target z is below x0*exp(rT); the risk-free policy already "
                "overshoots it (pass --force to explore anyway)");
  }

  auto scalar = [](double v) {
    return Eigen::MatrixXd::Constant(1, 1, v);
  };

  GameSpec spec;
  spec.dims = Dims{1, 1, 1};
  spec.horizon_T = asset.T;
  CoefficientSet c;
  c.A = scalar(asset.r);
  c.C = scalar(0.0);
  c.B1 = scalar(asset.mu1 - asset.r);
  c.B2 = scalar(asset.mu2 - asset.r);
  c.D1 = scalar(asset.sigma1);
  c.D2 = scalar(asset.sigma2);
  c.Q1 = scalar(0.0);
  c.Q2 = scalar(0.0);
  c.R1 = scalar(asset.sigma1);
  c.R2 = scalar(asset.sigma2);
  spec.coeffs = CoefficientProvider(c);
  spec.G1 = scalar(1.0);
  spec.G2 = scalar(1.0);
  spec.delta = std::min(asset.sigma1, asset.sigma2);
  return spec;
}

double discounted_target(const AssetSpec& asset, const TimeGrid& grid, int i) {
  return asset.z * std::exp(-asset.r * (grid.T - grid.node(i)));
}

std::pair<double, double> shifted_controls(const EreSolution& sol,
                                           const AssetSpec& asset, int t_index,
                                           double X) {
  if (t_index < 0 || t_index > sol.grid.N) {
    throw Error(ErrorCategory::validation, "t_index out of range");
  }
  const double shifted = X - discounted_target(asset, sol.grid, t_index);
  return {sol.theta1_bar[t_index](0, 0) * shifted,
          sol.theta2_star[t_index](0, 0) * shifted};
}

double FigureBundle::wealth(int path, int node) const {
  return ensemble.state(path, node)(0) +
         discounted_target(asset, grid, node);
}

FigureBundle reproduce_figures(const AssetSpec& asset, const TimeGrid& grid,
                               int num_paths, std::uint64_t seed,
                               bool allow_infeasible_target) {
  const GameSpec spec = asset_to_game(asset, allow_infeasible_target);
  FigureBundle bundle;
  bundle.grid = grid;
  bundle.asset = asset;
  bundle.solution = solve_ere(spec, grid);

  GainSchedule gains;
  gains.grid = grid;
  gains.theta1 = bundle.solution.theta1_bar;
  gains.theta2 = bundle.solution.theta2_star;

  Eigen::VectorXd xi(1);
  xi(0) = asset.x0 - discounted_target(asset, grid, 0);
  bundle.ensemble = simulate(gains, xi, spec, grid, num_paths, seed);
  return bundle;
}

}  // namespace slqg
