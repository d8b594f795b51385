#include "slqg/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace slqg {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& node, const char* name, int rows,
                             int cols) {
  Eigen::MatrixXd M(rows, cols);
  if (node.is_number()) {
    if (rows != 1 || cols != 1) {
      throw Error(ErrorCategory::validation,
                  std::string(name) + ": scalar given for a non-1x1 matrix");
    }
    M(0, 0) = node.get<double>();
    return M;
  }
  if (!node.is_array() || static_cast<int>(node.size()) != rows) {
    throw Error(ErrorCategory::validation,
                std::string(name) + ": expected " + std::to_string(rows) +
                    " rows");
  }
  for (int i = 0; i < rows; ++i) {
    const json& row = node[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw Error(ErrorCategory::validation,
                  std::string(name) + ": expected " + std::to_string(cols) +
                      " columns in row " + std::to_string(i));
    }
    for (int j = 0; j < cols; ++j) {
      if (!row[j].is_number()) {
        throw Error(ErrorCategory::validation,
                    std::string(name) + ": non-numeric entry");
      }
      M(i, j) = row[j].get<double>();
    }
  }
  return M;
}

const json& require_key(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCategory::validation,
                std::string("missing key \"") + key + "\" in game spec");
  }
  return *it;
}

void write_matrix_cells(std::ostream& os, const Eigen::MatrixXd& M) {
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) os << ',' << format_double(M(i, j));
}

void matrix_headers(std::ostream& os, const std::string& prefix, int rows,
                    int cols) {
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      os << ',' << prefix << '_' << i << '_' << j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

GameSpec parse_game_spec(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCategory::validation,
                std::string("game spec is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw Error(ErrorCategory::validation, "game spec must be a JSON object");
  }

  const json& jd = require_key(root, "dims");
  Dims dims;
  dims.n = require_key(jd, "n").get<int>();
  dims.m1 = require_key(jd, "m1").get<int>();
  dims.m2 = require_key(jd, "m2").get<int>();
  if (dims.n <= 0 || dims.m1 <= 0 || dims.m2 <= 0) {
    throw Error(ErrorCategory::validation, "dims must be positive");
  }

  GameSpec spec;
  spec.dims = dims;
  spec.horizon_T = require_key(root, "horizon_T").get<double>();
  spec.delta = require_key(root, "delta").get<double>();

  CoefficientSet c;
  c.A = parse_matrix(require_key(root, "A"), "A", dims.n, dims.n);
  c.C = parse_matrix(require_key(root, "C"), "C", dims.n, dims.n);
  c.B1 = parse_matrix(require_key(root, "B1"), "B1", dims.n, dims.m1);
  c.D1 = parse_matrix(require_key(root, "D1"), "D1", dims.n, dims.m1);
  c.B2 = parse_matrix(require_key(root, "B2"), "B2", dims.n, dims.m2);
  c.D2 = parse_matrix(require_key(root, "D2"), "D2", dims.n, dims.m2);
  c.Q1 = parse_matrix(require_key(root, "Q1"), "Q1", dims.n, dims.n);
  c.Q2 = parse_matrix(require_key(root, "Q2"), "Q2", dims.n, dims.n);
  c.R1 = parse_matrix(require_key(root, "R1"), "R1", dims.m1, dims.m1);
  c.R2 = parse_matrix(require_key(root, "R2"), "R2", dims.m2, dims.m2);
  spec.coeffs = CoefficientProvider(c);
  spec.G1 = parse_matrix(require_key(root, "G1"), "G1", dims.n, dims.n);
  spec.G2 = parse_matrix(require_key(root, "G2"), "G2", dims.n, dims.n);
  return spec;
}

GameSpec load_game_spec(const std::string& path) {
  return parse_game_spec(read_text_file(path));
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_solution_csv(std::ostream& os, const EreSolution& sol) {
  const int n = static_cast<int>(sol.P1[0].rows());
  const int m1 = static_cast<int>(sol.theta1_bar[0].rows());
  const int m2 = static_cast<int>(sol.theta2_star[0].rows());

  os << "t";
  matrix_headers(os, "P1", n, n);
  matrix_headers(os, "P2", n, n);
  matrix_headers(os, "theta1", m1, n);
  matrix_headers(os, "theta2", m2, n);
  os << ",min_eig_P1,min_eig_P2,min_eig_follower_metric,min_eig_leader_metric,"
        "residual_norm\n";

  for (int i = 0; i <= sol.grid.N; ++i) {
    os << format_double(sol.grid.node(i));
    write_matrix_cells(os, sol.P1[i]);
    write_matrix_cells(os, sol.P2[i]);
    write_matrix_cells(os, sol.theta1_bar[i]);
    write_matrix_cells(os, sol.theta2_star[i]);
    const NodeDiagnostics& d = sol.diagnostics[i];
    os << ',' << format_double(d.min_eig_P1) << ','
       << format_double(d.min_eig_P2) << ','
       << format_double(d.min_eig_follower_metric) << ','
       << format_double(d.min_eig_leader_metric) << ','
       << format_double(d.residual_norm) << '\n';
  }
}

GainSchedule load_gain_schedule(const std::string& path, const Dims& dims) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCategory::io, "gain file is empty: " + path);
  }
  const std::vector<std::string> headers = split_csv_line(line);

  // Column lookup by header name; tolerates extra columns in any order.
  auto column = [&](const std::string& name) {
    for (std::size_t k = 0; k < headers.size(); ++k) {
      if (headers[k] == name) return static_cast<int>(k);
    }
    return -1;
  };

  std::vector<std::vector<int>> th1_cols(dims.m1,
                                         std::vector<int>(dims.n, -1));
  std::vector<std::vector<int>> th2_cols(dims.m2,
                                         std::vector<int>(dims.n, -1));
  bool have_theta2 = true;
  for (int i = 0; i < dims.m1; ++i) {
    for (int j = 0; j < dims.n; ++j) {
      th1_cols[i][j] = column("theta1_" + std::to_string(i) + "_" +
                              std::to_string(j));
      if (th1_cols[i][j] < 0) {
        throw Error(ErrorCategory::io,
                    "gain file lacks a theta1 column for entry (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  for (int i = 0; i < dims.m2; ++i) {
    for (int j = 0; j < dims.n; ++j) {
      th2_cols[i][j] = column("theta2_" + std::to_string(i) + "_" +
                              std::to_string(j));
      if (th2_cols[i][j] < 0) have_theta2 = false;
    }
  }
  const int t_col = column("t");
  if (t_col < 0) {
    throw Error(ErrorCategory::io, "gain file lacks a t column");
  }

  std::vector<double> times;
  std::vector<Eigen::MatrixXd> th1, th2;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = split_csv_line(line);
    auto cell_value = [&](int k) {
      if (k < 0 || k >= static_cast<int>(cells.size())) {
        throw Error(ErrorCategory::io, "short row in gain file");
      }
      return std::stod(cells[k]);
    };
    times.push_back(cell_value(t_col));
    Eigen::MatrixXd M1(dims.m1, dims.n);
    for (int i = 0; i < dims.m1; ++i)
      for (int j = 0; j < dims.n; ++j) M1(i, j) = cell_value(th1_cols[i][j]);
    th1.push_back(std::move(M1));
    if (have_theta2) {
      Eigen::MatrixXd M2(dims.m2, dims.n);
      for (int i = 0; i < dims.m2; ++i)
        for (int j = 0; j < dims.n; ++j)
          M2(i, j) = cell_value(th2_cols[i][j]);
      th2.push_back(std::move(M2));
    }
  }
  if (times.size() < 2) {
    throw Error(ErrorCategory::io, "gain file needs at least two rows");
  }

  GainSchedule gains;
  const int N = static_cast<int>(times.size()) - 1;
  gains.grid = TimeGrid::uniform(times.back(), N);
  gains.theta1 = std::move(th1);
  if (have_theta2) gains.theta2 = std::move(th2);
  return gains;
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ensemble,
                        const GameSpec& spec) {
  os << "path,node,t";
  matrix_headers(os, "x", ensemble.n, 1);
  matrix_headers(os, "u", ensemble.m1, 1);
  matrix_headers(os, "v", ensemble.m2, 1);
  os << ",dW\n";
  for (int p = 0; p < ensemble.num_paths; ++p) {
    for (int i = 0; i <= ensemble.grid.N; ++i) {
      os << p << ',' << i << ',' << format_double(ensemble.grid.node(i));
      const auto x = ensemble.state(p, i);
      for (int k = 0; k < ensemble.n; ++k)
        os << ',' << format_double(x(k));
      const auto u = ensemble.control_u(p, i);
      for (int k = 0; k < ensemble.m1; ++k)
        os << ',' << format_double(u(k));
      const auto v = ensemble.control_v(p, i);
      for (int k = 0; k < ensemble.m2; ++k)
        os << ',' << format_double(v(k));
      if (i < ensemble.grid.N) {
        os << ',' << format_double(ensemble.increment(p, i));
      } else {
        os << ',';
      }
      os << '\n';
    }
  }
  const CostEstimate j1 = estimate_cost(ensemble, spec, Player::leader);
  const CostEstimate j2 = estimate_cost(ensemble, spec, Player::follower);
  os << "# paths=" << ensemble.num_paths << " seed=" << ensemble.seed << "\n";
  os << "# leader_cost_mean=" << format_double(j1.mean)
     << " leader_cost_se=" << format_double(j1.std_error) << "\n";
  os << "# follower_cost_mean=" << format_double(j2.mean)
     << " follower_cost_se=" << format_double(j2.std_error) << "\n";
}

void write_fig1_csv(std::ostream& os, const FigureBundle& bundle) {
  os << "# value curves: t, P1(t), P2(t)\n";
  os << "t,P1,P2\n";
  for (int i = 0; i <= bundle.grid.N; ++i) {
    os << format_double(bundle.grid.node(i)) << ','
       << format_double(bundle.solution.P1[i](0, 0)) << ','
       << format_double(bundle.solution.P2[i](0, 0)) << '\n';
  }
}

void write_fig2_csv(std::ostream& os, const FigureBundle& bundle) {
  os << "# simulated wealth paths: path, t, X\n";
  os << "path,t,X\n";
  for (int p = 0; p < bundle.ensemble.num_paths; ++p) {
    for (int i = 0; i <= bundle.grid.N; ++i) {
      os << p << ',' << format_double(bundle.grid.node(i)) << ','
         << format_double(bundle.wealth(p, i)) << '\n';
    }
  }
}

void write_fig3_csv(std::ostream& os, const FigureBundle& bundle) {
  os << "# equilibrium dollar allocations: path, t, u1, u2\n";
  os << "path,t,u1,u2\n";
  for (int p = 0; p < bundle.ensemble.num_paths; ++p) {
    for (int i = 0; i <= bundle.grid.N; ++i) {
      os << p << ',' << format_double(bundle.grid.node(i)) << ','
         << format_double(bundle.ensemble.control_u(p, i)(0)) << ','
         << format_double(bundle.ensemble.control_v(p, i)(0)) << '\n';
    }
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCategory::io, "cannot open file: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCategory::io, "cannot open file for writing: " + path);
  }
  out << content;
  if (!out) {
    throw Error(ErrorCategory::io, "failed writing file: " + path);
  }
}

}  // namespace slqg
