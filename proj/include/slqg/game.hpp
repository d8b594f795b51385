#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slqg/errors.hpp"

namespace slqg {

struct Dims {
  int n = 1;   // state dimension
  int m1 = 1;  // leader control dimension
  int m2 = 1;  // follower control dimension
};

// All coefficient matrices of the game at one time point.
//   dX = (A X + B1 u + B2 v) dt + (C X + D1 u + D2 v) dW
// with quadratic costs weighted by (Q_k, R_k, G_k) for player k.
struct CoefficientSet {
  Eigen::MatrixXd A, C;    // n x n
  Eigen::MatrixXd B1, D1;  // n x m1
  Eigen::MatrixXd B2, D2;  // n x m2
  Eigen::MatrixXd Q1, Q2;  // n x n, symmetric
  Eigen::MatrixXd R1;      // m1 x m1, symmetric
  Eigen::MatrixXd R2;      // m2 x m2, symmetric
};

// Uniform grid t_i = i * T / N, i = 0..N.
struct TimeGrid {
  double T = 1.0;
  int N = 1;

  double dt() const { return T / N; }
  double node(int i) const { return (T * i) / N; }

  static TimeGrid uniform(double T, int N);
};

// Time -> CoefficientSet map. Constant games keep one set; time-varying games
// wrap a callable evaluated at grid nodes.
class CoefficientProvider {
 public:
  using EvalFn = std::function<CoefficientSet(double)>;

  CoefficientProvider() = default;
  explicit CoefficientProvider(CoefficientSet constant);
  explicit CoefficientProvider(EvalFn fn);

  CoefficientSet operator()(double t) const;
  bool is_constant() const { return constant_.has_value(); }

 private:
  std::optional<CoefficientSet> constant_;
  EvalFn fn_;
};

struct GameSpec {
  Dims dims;
  double horizon_T = 1.0;
  CoefficientProvider coeffs;
  Eigen::MatrixXd G1, G2;  // terminal weights, symmetric PSD
  double delta = 0.0;      // control weight margin: R_k >= delta * I
};

struct ValidationIssue {
  std::string message;
  int node_index = -1;
};

// Worst-case (over grid nodes) minimum eigenvalues of the checked weights.
struct ValidationReport {
  bool valid = false;
  std::vector<ValidationIssue> issues;
  double min_eig_Q1 = 0, min_eig_Q2 = 0;
  double min_eig_R1_shifted = 0, min_eig_R2_shifted = 0;  // of R_k - delta*I
  double min_eig_G1 = 0, min_eig_G2 = 0;
};

using CoefficientTable = std::vector<CoefficientSet>;

// Evaluates the provider at every grid node, checks shapes and finiteness,
// and projects the symmetric weights onto exact symmetry, (M + M^T)/2.
// Throws Error(validation) on shape mismatch or non-finite entries.
CoefficientTable sample_coefficients(const GameSpec& spec, const TimeGrid& grid);

// Checks the standing assumptions: Q_k(t), G_k PSD and R_k(t) >= delta*I at
// every node (min-eigenvalue tolerance -1e-10), delta > 0, finite data.
// Structural problems (shapes, NaNs) throw; assumption violations are
// reported with valid = false.
ValidationReport validate_spec(const GameSpec& spec, const TimeGrid& grid);

// Helpers shared across modules.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M);
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

// Inverse of a symmetric positive definite matrix via eigendecomposition.
// Throws Error(singularity) carrying `what` and the offending eigenvalue when
// the smallest eigenvalue is below the 1e-10 floor.
struct SpdInverse {
  Eigen::MatrixXd inverse;
  double min_eig = 0;
};
SpdInverse spd_inverse(const Eigen::MatrixXd& M, const std::string& what,
                       int node_index = -1);

}  // namespace slqg
