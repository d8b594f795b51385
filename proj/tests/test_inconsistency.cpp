#include <doctest.h>

#include <cmath>

#include "slqg/inconsistency.hpp"

using namespace slqg;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("boundary problem solves with tiny residual and frozen values") {
  const Example11Spec spec;
  const TimeGrid grid = TimeGrid::uniform(1.0, 1000);
  const TpbvpSolution sol = solve_open_loop_fbsde(spec, grid);

  CHECK(sol.x_star[0] == 1.0);
  CHECK(sol.y_star[0] == 0.0);
  CHECK(sol.boundary_residual <= 1e-8);

  CHECK(std::abs(sol.p2_star[0] - 0.845401) < 1e-6);
  CHECK(std::abs(sol.p1_star[0] - 0.496251) < 1e-6);
  CHECK(std::abs(sol.x_star[1000] - 0.282965) < 1e-6);
  CHECK(std::abs(sol.p2_star[1000] - 0.282965) < 1e-6);
  CHECK(std::abs(sol.y_star[1000] - 0.210452) < 1e-6);
  CHECK(std::abs(sol.p1_star[1000] - 0.0725122) < 1e-7);
  CHECK(std::abs(sol.y_star[500] - 0.15475423373954425) < 1e-9);

  // Controls follow the costates pointwise.
  for (int i : {0, 250, 777, 1000}) {
    CHECK(sol.u_star[i] == -sol.p1_star[i]);
    CHECK(sol.v_star[i] == -sol.p2_star[i]);
  }
}

TEST_CASE("trajectories satisfy the differential system to 1e-6") {
  const Example11Spec spec;
  const int N = 2000;
  const TimeGrid grid = TimeGrid::uniform(1.0, N);
  const TpbvpSolution sol = solve_open_loop_fbsde(spec, grid);
  const double dt = grid.dt();

  const double scale =
      1.0 + std::max({max_abs(sol.x_star), max_abs(sol.p2_star),
                      max_abs(sol.y_star), max_abs(sol.p1_star)});
  double worst = 0;
  for (int i = 200; i < N; i += 200) {
    auto cd = [&](const std::vector<double>& z) {
      return (z[i + 1] - z[i - 1]) / (2 * dt);
    };
    const double x = sol.x_star[i], p2 = sol.p2_star[i], y = sol.y_star[i],
                 p1 = sol.p1_star[i];
    worst = std::max(worst, std::abs(cd(sol.x_star) - (-p1 - p2)));
    worst = std::max(worst, std::abs(cd(sol.p2_star) - (-x)));
    worst = std::max(worst, std::abs(cd(sol.y_star) - p1));
    worst = std::max(worst, std::abs(cd(sol.p1_star) - (y - x)));
  }
  CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("refinement converges at fourth order") {
  const Example11Spec spec;
  auto p2_at_zero = [&](int n) {
    return solve_open_loop_fbsde(spec, TimeGrid::uniform(1.0, n)).p2_star[0];
  };
  // Finer ladders than this sit on the roundoff floor of the propagated
  // fundamental matrix (~1e-13 for p2(0)), so stop at N = 1000.
  const double v125 = p2_at_zero(125);
  const double v250 = p2_at_zero(250);
  const double v500 = p2_at_zero(500);
  const double v1000 = p2_at_zero(1000);
  const double d1 = std::abs(v250 - v125);
  const double d2 = std::abs(v500 - v250);
  const double d3 = std::abs(v1000 - v500);
  CHECK(d1 / d2 >= 8.0);
  CHECK(d2 / d3 >= 8.0);
}

TEST_CASE("the solution is linear in the initial state") {
  Example11Spec spec;
  const TimeGrid grid = TimeGrid::uniform(1.0, 400);
  const TpbvpSolution base = solve_open_loop_fbsde(spec, grid);

  spec.x0 = 2.0;
  const TpbvpSolution doubled = solve_open_loop_fbsde(spec, grid);
  spec.x0 = -1.0;
  const TpbvpSolution negated = solve_open_loop_fbsde(spec, grid);

  double worst = 0;
  for (int i = 0; i <= grid.N; ++i) {
    worst = std::max(worst,
                     std::abs(doubled.u_star[i] - 2.0 * base.u_star[i]) /
                         (1.0 + std::abs(base.u_star[i])));
    worst = std::max(worst,
                     std::abs(negated.x_star[i] + base.x_star[i]) /
                         (1.0 + std::abs(base.x_star[i])));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("a zero initial state yields the zero solution") {
  Example11Spec spec;
  spec.x0 = 0.0;
  const TpbvpSolution sol =
      solve_open_loop_fbsde(spec, TimeGrid::uniform(1.0, 200));
  CHECK(max_abs(sol.x_star) == 0.0);
  CHECK(max_abs(sol.y_star) == 0.0);
  CHECK(max_abs(sol.p1_star) == 0.0);
  CHECK(max_abs(sol.p2_star) == 0.0);
  CHECK(max_abs(sol.u_star) == 0.0);
  CHECK(sol.boundary_residual == 0.0);
}

TEST_CASE("restarting mid-flight changes the controls") {
  const Example11Spec spec;
  const TimeGrid grid = TimeGrid::uniform(1.0, 1000);
  const RestartReport rep = restart_experiment(spec, grid, 500);

  CHECK(std::abs(rep.y_at_restart - 0.15475423373954425) < 1e-9);
  CHECK(std::abs(rep.u_deviation_sup - 0.12958953491720127) < 1e-9);
  CHECK(rep.y_at_restart > 1e-3);
  CHECK(rep.u_deviation_sup > 1e-3);
  CHECK(rep.v_deviation_sup > 1e-3);
  CHECK(rep.restarted.boundary_residual <= 1e-8);
  // The restarted path starts from the original state with y wiped.
  CHECK(rep.restarted.x_star[0] ==
        solve_open_loop_fbsde(spec, grid).x_star[500]);
  CHECK(rep.restarted.y_star[0] == 0.0);
}

TEST_CASE("the follower drift over restart times peaks in the interior") {
  const Example11Spec spec;
  const TimeGrid grid = TimeGrid::uniform(1.0, 400);
  std::vector<double> dv;
  for (int k = 1; k < 20; ++k) {
    dv.push_back(
        restart_experiment(spec, grid, k * grid.N / 20).v_deviation_sup);
  }
  std::size_t arg = 0;
  for (std::size_t i = 0; i < dv.size(); ++i) {
    if (dv[i] > dv[arg]) arg = i;
  }
  CHECK(arg > 0);
  CHECK(arg < dv.size() - 1);
  CHECK(dv[arg] > dv.front());
  CHECK(dv[arg] > dv.back());
}

TEST_CASE("parameter and index validation") {
  Example11Spec spec;
  const TimeGrid grid = TimeGrid::uniform(1.0, 100);

  spec.R1 = 0.0;
  CHECK_THROWS_AS((void)solve_open_loop_fbsde(spec, grid), Error);
  spec = Example11Spec{};
  spec.B2 = 0.0;
  CHECK_THROWS_AS((void)solve_open_loop_fbsde(spec, grid), Error);
  spec = Example11Spec{};
  spec.G2 = -1.0;
  CHECK_THROWS_AS((void)solve_open_loop_fbsde(spec, grid), Error);

  spec = Example11Spec{};
  CHECK_THROWS_AS((void)restart_experiment(spec, grid, 0), Error);
  CHECK_THROWS_AS((void)restart_experiment(spec, grid, 100), Error);
  CHECK_THROWS_AS(
      (void)solve_open_loop_fbsde(spec, TimeGrid::uniform(2.0, 100)), Error);
}
