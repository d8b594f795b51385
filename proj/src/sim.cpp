#include "slqg/sim.hpp"

#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "slqg/rng.hpp"

namespace slqg {

namespace {

// Resolved per-node closed-loop data shared by all worker threads.
struct LoopData {
  CoefficientTable table;
  std::vector<Eigen::MatrixXd> theta1;
  std::vector<Eigen::MatrixXd> theta2;
};

void run_paths(const LoopData& loop, const Eigen::VectorXd& x0,
               const TimeGrid& grid, int first_path, int last_path,
               PathEnsemble& out) {
  const int N = grid.N;
  const double dt = grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  const int n = out.n, m1 = out.m1, m2 = out.m2;

  Eigen::VectorXd x = x0, u(m1), v(m2), drift(n), diff(n);
  for (int p = first_path; p < last_path; ++p) {
    x = x0;
    double* xs = out.states.data() + static_cast<std::size_t>(p) * (N + 1) * n;
    double* us =
        out.controls_u.data() + static_cast<std::size_t>(p) * (N + 1) * m1;
    double* vs =
        out.controls_v.data() + static_cast<std::size_t>(p) * (N + 1) * m2;
    double* dws = out.increments.data() + static_cast<std::size_t>(p) * N;

    for (int i = 0; i <= N; ++i) {
      const CoefficientSet& c = loop.table[i];
      u.noalias() = loop.theta1[i] * x;
      v.noalias() = loop.theta2[i] * x;
      Eigen::Map<Eigen::VectorXd>(xs + static_cast<std::size_t>(i) * n, n) = x;
      Eigen::Map<Eigen::VectorXd>(us + static_cast<std::size_t>(i) * m1, m1) = u;
      Eigen::Map<Eigen::VectorXd>(vs + static_cast<std::size_t>(i) * m2, m2) = v;
      if (i == N) break;

      const double dw =
          gaussian_draw(out.seed, static_cast<std::uint64_t>(p),
                        static_cast<std::uint64_t>(i)) *
          sqrt_dt;
      dws[i] = dw;
      drift.noalias() = c.A * x + c.B1 * u + c.B2 * v;
      diff.noalias() = c.C * x + c.D1 * u + c.D2 * v;
      x += dt * drift + dw * diff;
      if (!x.allFinite()) {
        std::ostringstream msg;
        msg << "state became non-finite on path " << p << " at step " << i;
        throw Error(ErrorCategory::simulation, msg.str(), i);
      }
    }
  }
}

}  // namespace

PathEnsemble simulate(const GainSchedule& gains, const Eigen::VectorXd& x0,
                      const GameSpec& spec, const TimeGrid& grid,
                      int num_paths, std::uint64_t seed, int num_workers) {
  if (num_paths <= 0) {
    throw Error(ErrorCategory::validation, "num_paths must be positive");
  }
  if (x0.size() != spec.dims.n) {
    throw Error(ErrorCategory::validation, "x0 has wrong dimension");
  }
  if (static_cast<int>(gains.theta1.size()) != grid.N + 1) {
    throw Error(ErrorCategory::validation,
                "gain schedule must have N+1 entries");
  }

  LoopData loop;
  loop.table = sample_coefficients(spec, grid);
  loop.theta1 = gains.theta1;
  if (gains.theta2.has_value()) {
    if (static_cast<int>(gains.theta2->size()) != grid.N + 1) {
      throw Error(ErrorCategory::validation,
                  "gain schedule must have N+1 entries");
    }
    loop.theta2 = *gains.theta2;
  } else {
    const std::vector<Eigen::MatrixXd> P2 =
        solve_follower_riccati(gains.theta1, spec, grid);
    loop.theta2.resize(grid.N + 1);
    for (int j = 0; j <= grid.N; ++j) {
      loop.theta2[j] = theta2_star(loop.table[j], gains.theta1[j], P2[j], j);
    }
  }

  PathEnsemble out;
  out.grid = grid;
  out.num_paths = num_paths;
  out.seed = seed;
  out.n = spec.dims.n;
  out.m1 = spec.dims.m1;
  out.m2 = spec.dims.m2;
  out.states.resize(static_cast<std::size_t>(num_paths) * (grid.N + 1) * out.n);
  out.controls_u.resize(static_cast<std::size_t>(num_paths) * (grid.N + 1) *
                        out.m1);
  out.controls_v.resize(static_cast<std::size_t>(num_paths) * (grid.N + 1) *
                        out.m2);
  out.increments.resize(static_cast<std::size_t>(num_paths) * grid.N);

  int workers = num_workers;
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers <= 0) workers = 1;
  }
  workers = std::min(workers, num_paths);

  if (workers == 1) {
    run_paths(loop, x0, grid, 0, num_paths, out);
    return out;
  }

  // Contiguous path blocks; every path draws its own noise stream, so the
  // partition does not affect the values written.
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const int base = num_paths / workers, extra = num_paths % workers;
  int start = 0;
  for (int w = 0; w < workers; ++w) {
    const int count = base + (w < extra ? 1 : 0);
    const int first = start, last = start + count;
    start = last;
    pool.emplace_back([&, w, first, last] {
      try {
        run_paths(loop, x0, grid, first, last, out);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double pairwise_sum(const double* data, std::size_t count) {
  if (count == 0) return 0.0;
  if (count <= 8) {
    double s = data[0];
    for (std::size_t i = 1; i < count; ++i) s += data[i];
    return s;
  }
  const std::size_t half = count / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

CostEstimate estimate_cost(const PathEnsemble& ensemble, const GameSpec& spec,
                           Player player) {
  const TimeGrid& grid = ensemble.grid;
  const CoefficientTable table = sample_coefficients(spec, grid);
  const double dt = grid.dt();
  const Eigen::MatrixXd& G = player == Player::leader ? spec.G1 : spec.G2;

  std::vector<double> per_path(ensemble.num_paths);
  for (int p = 0; p < ensemble.num_paths; ++p) {
    double run = 0.0;
    for (int i = 0; i < grid.N; ++i) {
      const CoefficientSet& c = table[i];
      const auto x = ensemble.state(p, i);
      double node_cost;
      if (player == Player::leader) {
        const auto u = ensemble.control_u(p, i);
        node_cost = x.dot(c.Q1 * x) + u.dot(c.R1 * u);
      } else {
        const auto v = ensemble.control_v(p, i);
        node_cost = x.dot(c.Q2 * x) + v.dot(c.R2 * v);
      }
      run += node_cost * dt;
    }
    const auto xT = ensemble.state(p, grid.N);
    per_path[p] = 0.5 * (run + xT.dot(G * xT));
  }

  CostEstimate est;
  est.player = player;
  est.num_paths = ensemble.num_paths;
  est.mean = pairwise_sum(per_path.data(), per_path.size()) /
             static_cast<double>(ensemble.num_paths);
  double ss = 0.0;
  if (ensemble.num_paths > 1) {
    std::vector<double> sq(ensemble.num_paths);
    for (int p = 0; p < ensemble.num_paths; ++p) {
      const double d = per_path[p] - est.mean;
      sq[p] = d * d;
    }
    ss = pairwise_sum(sq.data(), sq.size()) /
         static_cast<double>(ensemble.num_paths - 1);
  }
  est.std_error = std::sqrt(ss / static_cast<double>(ensemble.num_paths));
  return est;
}

}  // namespace slqg
