#include "slqg/game.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace slqg {

TimeGrid TimeGrid::uniform(double T, int N) {
  if (!(T > 0) || N < 1) {
    throw Error(ErrorCategory::validation,
                "time grid requires T > 0 and N >= 1");
  }
  return TimeGrid{T, N};
}

CoefficientProvider::CoefficientProvider(CoefficientSet constant)
    : constant_(std::move(constant)) {}

CoefficientProvider::CoefficientProvider(EvalFn fn) : fn_(std::move(fn)) {}

CoefficientSet CoefficientProvider::operator()(double t) const {
  if (constant_) return *constant_;
  if (!fn_) {
    throw Error(ErrorCategory::validation, "coefficient provider is empty");
  }
  return fn_(t);
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& M) {
  return 0.5 * (M + M.transpose());
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 1 && symmetric.cols() == 1) return symmetric(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

SpdInverse spd_inverse(const Eigen::MatrixXd& M, const std::string& what,
                       int node_index) {
  constexpr double kEigFloor = 1e-10;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig >= kEigFloor)) {
    std::ostringstream msg;
    msg << what << " is not safely positive definite (min eigenvalue "
        << min_eig << " < 1e-10)";
    if (node_index >= 0) msg << " at node " << node_index;
    throw Error(ErrorCategory::singularity, msg.str(), node_index);
  }
  SpdInverse out;
  out.min_eig = min_eig;
  out.inverse = es.eigenvectors() *
                es.eigenvalues().cwiseInverse().asDiagonal() *
                es.eigenvectors().transpose();
  return out;
}

namespace {

void check_shape(const Eigen::MatrixXd& M, int rows, int cols,
                 const char* name) {
  if (M.rows() != rows || M.cols() != cols) {
    std::ostringstream msg;
    msg << "coefficient " << name << " has shape " << M.rows() << "x"
        << M.cols() << ", expected " << rows << "x" << cols;
    throw Error(ErrorCategory::validation, msg.str());
  }
}

void check_finite(const Eigen::MatrixXd& M, const char* name, int node) {
  if (!M.allFinite()) {
    std::ostringstream msg;
    msg << "coefficient " << name << " has a non-finite entry at node " << node;
    throw Error(ErrorCategory::validation, msg.str(), node);
  }
}

}  // namespace

CoefficientTable sample_coefficients(const GameSpec& spec,
                                     const TimeGrid& grid) {
  const auto [n, m1, m2] = spec.dims;
  if (n < 1 || m1 < 1 || m2 < 1) {
    throw Error(ErrorCategory::validation, "all dimensions must be >= 1");
  }
  CoefficientTable table;
  table.reserve(grid.N + 1);
  for (int i = 0; i <= grid.N; ++i) {
    CoefficientSet c = spec.coeffs(grid.node(i));
    check_shape(c.A, n, n, "A");
    check_shape(c.C, n, n, "C");
    check_shape(c.B1, n, m1, "B1");
    check_shape(c.D1, n, m1, "D1");
    check_shape(c.B2, n, m2, "B2");
    check_shape(c.D2, n, m2, "D2");
    check_shape(c.Q1, n, n, "Q1");
    check_shape(c.Q2, n, n, "Q2");
    check_shape(c.R1, m1, m1, "R1");
    check_shape(c.R2, m2, m2, "R2");
    check_finite(c.A, "A", i);
    check_finite(c.C, "C", i);
    check_finite(c.B1, "B1", i);
    check_finite(c.D1, "D1", i);
    check_finite(c.B2, "B2", i);
    check_finite(c.D2, "D2", i);
    check_finite(c.Q1, "Q1", i);
    check_finite(c.Q2, "Q2", i);
    check_finite(c.R1, "R1", i);
    check_finite(c.R2, "R2", i);
    c.Q1 = symmetrize(c.Q1);
    c.Q2 = symmetrize(c.Q2);
    c.R1 = symmetrize(c.R1);
    c.R2 = symmetrize(c.R2);
    table.push_back(std::move(c));
  }
  return table;
}

ValidationReport validate_spec(const GameSpec& spec, const TimeGrid& grid) {
  constexpr double kPsdTol = -1e-10;
  ValidationReport report;
  const int n = spec.dims.n;

  check_shape(spec.G1, n, n, "G1");
  check_shape(spec.G2, n, n, "G2");
  check_finite(spec.G1, "G1", grid.N);
  check_finite(spec.G2, "G2", grid.N);
  if (std::abs(grid.T - spec.horizon_T) > 1e-12 * (1.0 + spec.horizon_T)) {
    throw Error(ErrorCategory::validation,
                "time grid horizon does not match the spec horizon");
  }

  const CoefficientTable table = sample_coefficients(spec, grid);

  auto track = [&report](double& slot, double value, const char* name,
                         int node, double floor) {
    if (value < slot) slot = value;
    if (value < floor) {
      std::ostringstream msg;
      msg << name << " violated (min eigenvalue " << value << ") ";
      msg << "at node " << node;
      report.issues.push_back({msg.str(), node});
    }
  };

  report.min_eig_Q1 = report.min_eig_Q2 = report.min_eig_G1 =
      report.min_eig_G2 = report.min_eig_R1_shifted =
          report.min_eig_R2_shifted = std::numeric_limits<double>::infinity();

  if (!(spec.delta > 0)) {
    report.issues.push_back({"delta must be positive", -1});
  }

  const int m1 = spec.dims.m1, m2 = spec.dims.m2;
  const Eigen::MatrixXd I1 = Eigen::MatrixXd::Identity(m1, m1);
  const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(m2, m2);
  for (int i = 0; i <= grid.N; ++i) {
    const CoefficientSet& c = table[i];
    track(report.min_eig_Q1, min_eigenvalue(c.Q1), "Q1 >= 0", i, kPsdTol);
    track(report.min_eig_Q2, min_eigenvalue(c.Q2), "Q2 >= 0", i, kPsdTol);
    track(report.min_eig_R1_shifted, min_eigenvalue(c.R1 - spec.delta * I1),
          "R1 >= delta*I", i, kPsdTol);
    track(report.min_eig_R2_shifted, min_eigenvalue(c.R2 - spec.delta * I2),
          "R2 >= delta*I", i, kPsdTol);
  }
  track(report.min_eig_G1, min_eigenvalue(symmetrize(spec.G1)), "G1 >= 0",
        grid.N, kPsdTol);
  track(report.min_eig_G2, min_eigenvalue(symmetrize(spec.G2)), "G2 >= 0",
        grid.N, kPsdTol);

  report.valid = report.issues.empty();
  return report;
}

}  // namespace slqg
