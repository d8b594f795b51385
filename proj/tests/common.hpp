#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "slqg/asset.hpp"
#include "slqg/riccati.hpp"

namespace slqg::testing {

inline Eigen::MatrixXd sc(double v) {
  return Eigen::MatrixXd::Constant(1, 1, v);
}

// Scalar game builder; every coefficient is a number.
inline GameSpec scalar_spec(double A, double C, double B1, double D1,
                            double B2, double D2, double Q1, double Q2,
                            double R1, double R2, double G1, double G2,
                            double T, double delta) {
  GameSpec spec;
  spec.dims = Dims{1, 1, 1};
  spec.horizon_T = T;
  CoefficientSet c;
  c.A = sc(A);
  c.C = sc(C);
  c.B1 = sc(B1);
  c.D1 = sc(D1);
  c.B2 = sc(B2);
  c.D2 = sc(D2);
  c.Q1 = sc(Q1);
  c.Q2 = sc(Q2);
  c.R1 = sc(R1);
  c.R2 = sc(R2);
  spec.coeffs = CoefficientProvider(c);
  spec.G1 = sc(G1);
  spec.G2 = sc(G2);
  spec.delta = delta;
  return spec;
}

inline GameSpec table2_game() {
  return asset_to_game(AssetSpec::table2_defaults());
}

// Classical fourth-order reference integration of the coupled equilibrium
// equations, gains recomputed at every stage. Used as a continuum oracle for
// the first-order backward sweep.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> rk4_reference_ere(
    const GameSpec& spec, int steps) {
  const double T = spec.horizon_T;
  const double h = T / steps;
  Eigen::MatrixXd P1 = spec.G1, P2 = spec.G2;

  auto deriv = [&](double t, const Eigen::MatrixXd& p1,
                   const Eigen::MatrixXd& p2) {
    const CoefficientSet c = spec.coeffs(t);
    const Eigen::MatrixXd th1 = theta1_bar(c, p1, p2);
    return std::make_pair(rhs_P1(c, th1, p1, p2), rhs_P2(c, th1, p2));
  };

  // Integrate in the reversed time s = T - t, where dP/ds = +rhs.
  for (int k = 0; k < steps; ++k) {
    const double s = k * h;
    const auto [a1, a2] = deriv(T - s, P1, P2);
    const auto [b1, b2] =
        deriv(T - s - h / 2, P1 + (h / 2) * a1, P2 + (h / 2) * a2);
    const auto [c1, c2] =
        deriv(T - s - h / 2, P1 + (h / 2) * b1, P2 + (h / 2) * b2);
    const auto [d1, d2] = deriv(T - s - h, P1 + h * c1, P2 + h * c2);
    P1 = symmetrize(P1 + (h / 6) * (a1 + 2 * b1 + 2 * c1 + d1));
    P2 = symmetrize(P2 + (h / 6) * (a2 + 2 * b2 + 2 * c2 + d2));
  }
  return {P1, P2};
}

// Same reference for the follower equation alone, under a fixed constant
// leader gain, returning the full trajectory at the grid nodes.
inline std::vector<Eigen::MatrixXd> rk4_reference_follower(
    const GameSpec& spec, const Eigen::MatrixXd& theta1, int steps) {
  const double T = spec.horizon_T;
  const double h = T / steps;
  std::vector<Eigen::MatrixXd> out(steps + 1);
  Eigen::MatrixXd P2 = spec.G2;
  out[steps] = P2;
  auto deriv = [&](double t, const Eigen::MatrixXd& p2) {
    return rhs_P2(spec.coeffs(t), theta1, p2);
  };
  for (int k = steps; k >= 1; --k) {
    const double t = T * k / steps;
    const Eigen::MatrixXd a = deriv(t, P2);
    const Eigen::MatrixXd b = deriv(t - h / 2, P2 + (h / 2) * a);
    const Eigen::MatrixXd c = deriv(t - h / 2, P2 + (h / 2) * b);
    const Eigen::MatrixXd d = deriv(t - h, P2 + h * c);
    P2 = symmetrize(P2 + (h / 6) * (a + 2 * b + 2 * c + d));
    out[k - 1] = P2;
  }
  return out;
}

}  // namespace slqg::testing
