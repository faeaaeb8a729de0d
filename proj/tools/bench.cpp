// Benchmark: times the Monte Carlo harness and a single backward solve at
// several thread counts and checks that every configuration produces the
// same numbers as the serial reference.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bdsde/experiment.hpp"
#include "bdsde/solver.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int samples = argc > 1 ? std::atoi(argv[1]) : 64;
  const int n_steps = argc > 2 ? std::atoi(argv[2]) : 64;

  const bdsde::Problem problem = bdsde::example_1();
  const bdsde::TimeGrid time = bdsde::make_time_grid(n_steps, problem.horizon);

  std::vector<int> thread_counts = {1};
#ifdef _OPENMP
  const int hw = omp_get_max_threads();
  for (int t = 2; t <= hw; t *= 2) thread_counts.push_back(t);
  if (thread_counts.back() != hw && hw > 1) thread_counts.push_back(hw);
#endif

  std::printf("harness: %d samples, N = %d, grid 257, q = 8\n", samples, n_steps);
  std::printf("%-10s  %-10s  %-10s  %s\n", "threads", "time [s]", "speedup", "matches serial");

  bdsde::LevelErrors reference{};
  double serial_time = 0.0;
  for (int threads : thread_counts) {
    bdsde::SolverConfig config;
    config.threads = threads;
    const auto t0 = Clock::now();
    const bdsde::LevelErrors r = bdsde::rmse(
        problem, time, samples, 42, bdsde::ErrorMetric::point_at_x0, config);
    const double dt = seconds_since(t0);
    if (threads == 1) {
      reference = r;
      serial_time = dt;
    }
    const bool same = r.err_y_tilde == reference.err_y_tilde &&
                      r.err_y == reference.err_y && r.err_z == reference.err_z;
    std::printf("%-10d  %-10.3f  %-10.2f  %s\n", threads, dt, serial_time / dt,
                same ? "yes" : "NO");
    if (!same) return 1;
  }

  // Single backward solve, node loops serial vs OpenMP.
  const bdsde::QuadratureRule rule = bdsde::hermite_rule(8);
  const bdsde::SpaceGrid grid =
      bdsde::build_grid(problem.x0, bdsde::auto_radius(problem.horizon, rule), 1025);
  const bdsde::BrownianPath path = bdsde::sample_path(time, bdsde::mix_seed(42, 0));

  std::printf("\nsingle solve: N = %d, grid 1025\n", n_steps);
  bdsde::SolveOptions serial_options;
  auto t0 = Clock::now();
  const bdsde::SolveResult serial = bdsde::solve_backward(problem, grid, rule, time, path, serial_options);
  const double t_serial = seconds_since(t0);

  bdsde::SolveOptions parallel_options;
  parallel_options.parallel_nodes = true;
  t0 = Clock::now();
  const bdsde::SolveResult parallel = bdsde::solve_backward(problem, grid, rule, time, path, parallel_options);
  const double t_parallel = seconds_since(t0);

  bool same = true;
  for (int k = 0; k < grid.count; ++k) {
    same = same && serial.level0.y[k] == parallel.level0.y[k] &&
           serial.level0.z[k] == parallel.level0.z[k];
  }
  std::printf("serial node loop:   %.3f s\n", t_serial);
  std::printf("openmp node loop:   %.3f s (speedup %.2f), values %s\n", t_parallel,
              t_serial / t_parallel, same ? "identical" : "DIFFER");
  return same ? 0 : 1;
}
