#include "bdsde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace bdsde {

namespace {

void check_finite_level(const ValueLevel& level, const SpaceGrid& grid,
                        int time_index) {
  for (int k = 0; k < grid.count; ++k) {
    if (!std::isfinite(level.y_tilde[k]) || !std::isfinite(level.y[k]) ||
        !std::isfinite(level.z[k])) {
      throw std::runtime_error(
          "solve_backward: non-finite value at time level " +
          std::to_string(time_index) + ", node " + std::to_string(k) + " (x=" +
          std::to_string(grid.nodes[k]) + ")");
    }
  }
}

SolveResult run_backward(const Problem& problem, const SpaceGrid& grid,
                         const QuadratureRule& rule, const TimeGrid& time,
                         const BrownianPath& path, const SolveOptions& options,
                         bool with_corrector, bool corrector_at_next_time) {
  const int n = time.n_steps;
  if (static_cast<int>(path.increments.size()) != n) {
    throw std::invalid_argument("solve_backward: path has " +
                                std::to_string(path.increments.size()) +
                                " increments but the time grid has " +
                                std::to_string(n) + " steps");
  }

  SolveResult result;
  if (options.keep_levels) {
    result.levels.assign(n + 1, ValueLevel(grid.count, 0));
  }

  ValueLevel next = terminal_level(problem, grid, path, options);
  next.time_index = n;
  check_finite_level(next, grid, n);
  if (options.keep_levels) result.levels[n] = next;

  // Trust region: drivers with superlinear growth in y (outside the scheme's
  // Lipschitz assumptions) can run away at far-field grid nodes on rare
  // large-increment paths. Values are clamped to a generous envelope of the
  // terminal data scale; on-scale dynamics never reach it, and bounded
  // far-field garbage is killed by the Gaussian weights before it can reach
  // the interior.
  double terminal_scale = 0.0;
  for (double v : next.y) terminal_scale = std::max(terminal_scale, std::abs(v));
  for (double v : next.z) terminal_scale = std::max(terminal_scale, std::abs(v));
  const double value_cap = 10.0 * (1.0 + terminal_scale);
  const double update_cap = 8.0 * (1.0 + terminal_scale);
  auto clamp_field = [value_cap](std::vector<double>& field) {
    for (double& v : field) {
      if (v > value_cap) v = value_cap;
      if (v < -value_cap) v = -value_cap;
    }
  };

  ValueLevel current(grid.count, 0);
  for (int i = n - 1; i >= 0; --i) {
    const double t_next = time.time_at(i + 1);
    const double b_next = path.cumulative[i + 1];
    const double db = path.increments[i];

    step_bsde(problem, grid, rule, time.dt, t_next, b_next, path.b_T, next,
              current.y_tilde, current.z, options.parallel_nodes);
    clamp_field(current.y_tilde);
    clamp_field(current.z);
    if (with_corrector) {
      const double t_corr = corrector_at_next_time ? t_next : time.time_at(i);
      step_sde(problem, grid, rule, time.dt, t_corr, b_next, path.b_T,
               current.y_tilde, db, current.y, options.parallel_nodes,
               update_cap);
      clamp_field(current.y);
    } else {
      current.y = current.y_tilde;
    }
    current.time_index = i;
    check_finite_level(current, grid, i);
    if (options.keep_levels) result.levels[i] = current;
    std::swap(next, current);
  }

  result.level0 = std::move(next);
  return result;
}

}  // namespace

ValueLevel terminal_level(const Problem& problem, const SpaceGrid& grid,
                          const BrownianPath& path,
                          const SolveOptions& options) {
  const int n = grid.count;
  ValueLevel level(n, 0);
  level.time_index = 0;  // caller overwrites; terminal index depends on N
  for (int k = 0; k < n; ++k) {
    const double v = problem.terminal(grid.nodes[k], path.b_T);
    if (!std::isfinite(v)) {
      throw std::domain_error("terminal_level: terminal value non-finite at node " +
                              std::to_string(k) + " (x=" +
                              std::to_string(grid.nodes[k]) + ")");
    }
    level.y[k] = v;
    level.y_tilde[k] = v;
  }

  if (options.use_exact_terminal_z && problem.exact_z) {
    const double T = problem.horizon;
    for (int k = 0; k < n; ++k) {
      level.z[k] = problem.exact_z(T, grid.nodes[k], path.b_T, path.b_T);
    }
    return level;
  }

  // Gradient seed: central difference of the terminal condition with step
  // equal to the grid spacing; one-sided at the boundary.
  const double h = grid.spacing();
  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      level.z[k] = (level.y[1] - level.y[0]) / h;
    } else if (k == n - 1) {
      level.z[k] = (level.y[n - 1] - level.y[n - 2]) / h;
    } else {
      level.z[k] = (level.y[k + 1] - level.y[k - 1]) / (2.0 * h);
    }
  }
  return level;
}

void step_bsde(const Problem& problem, const SpaceGrid& grid,
               const QuadratureRule& rule, double dt, double t_next,
               double b_next, double b_T, const ValueLevel& next,
               std::span<double> y_tilde_out, std::span<double> z_out,
               bool parallel) {
  if (static_cast<int>(y_tilde_out.size()) != grid.count ||
      static_cast<int>(z_out.size()) != grid.count) {
    throw std::invalid_argument("step_bsde: output span length mismatch");
  }
  const std::span<const double> next_y(next.y);
  const std::span<const double> next_z(next.z);

  // Exceptions may not cross an OpenMP region; capture and rethrow.
  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(static) if (parallel)
  for (int k = 0; k < grid.count; ++k) {
    try {
      auto h = [&](double xp) {
        const double y = interpolate(next_y, grid, xp);
        const double z = interpolate(next_z, grid, xp);
        return y + dt * problem.f(t_next, xp, y, z, b_next, b_T);
      };
      const auto sums = detail::gh_sums(h, grid.nodes[k], dt, rule);
      y_tilde_out[k] = sums.mean;
      z_out[k] = sums.mean_dw / dt;
    } catch (...) {
#pragma omp critical
      {
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void step_sde(const Problem& problem, const SpaceGrid& grid,
              const QuadratureRule& rule, double dt, double t_eval,
              double b_next, double b_T, std::span<const double> y_tilde,
              double db, std::span<double> y_out, bool parallel,
              double update_cap) {
  if (static_cast<int>(y_tilde.size()) != grid.count ||
      static_cast<int>(y_out.size()) != grid.count) {
    throw std::invalid_argument("step_sde: span length mismatch");
  }
  const double milstein_weight = 0.5 * (db * db - dt);

  std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(static) if (parallel)
  for (int k = 0; k < grid.count; ++k) {
    try {
      const double xi = y_tilde[k];
      const double eg =
          detail::gh_sums(
              [&](double xp) { return problem.g(t_eval, xp, xi, b_next, b_T); },
              grid.nodes[k], dt, rule)
              .mean;
      const double egg =
          detail::gh_sums(
              [&](double xp) { return problem.g_y_g(t_eval, xp, xi, b_next, b_T); },
              grid.nodes[k], dt, rule)
              .mean;
      double update = db * eg + milstein_weight * egg;
      if (update_cap > 0.0) {
        update = std::clamp(update, -update_cap, update_cap);
      }
      y_out[k] = xi + update;
    } catch (...) {
#pragma omp critical
      {
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

SolveResult solve_backward(const Problem& problem, const SpaceGrid& grid,
                           const QuadratureRule& rule, const TimeGrid& time,
                           const BrownianPath& path,
                           const SolveOptions& options) {
  return run_backward(problem, grid, rule, time, path, options, true,
                      options.corrector_at_next_time);
}

SolveResult solve_backward_bsde(const Problem& problem, const SpaceGrid& grid,
                                const QuadratureRule& rule,
                                const TimeGrid& time, const BrownianPath& path,
                                const SolveOptions& options) {
  return run_backward(problem, grid, rule, time, path, options, false,
                      options.corrector_at_next_time);
}

void write_trace(std::ostream& out, const SolveResult& result,
                 const SpaceGrid& grid) {
  if (result.levels.empty()) {
    throw std::invalid_argument("write_trace: result was produced without keep_levels");
  }
  out << "# time_index node y_tilde y z\n";
  char row[160];
  for (const ValueLevel& level : result.levels) {
    for (int k = 0; k < grid.count; ++k) {
      std::snprintf(row, sizeof(row), "%d %.17g %.17g %.17g %.17g\n",
                    level.time_index, grid.nodes[k], level.y_tilde[k],
                    level.y[k], level.z[k]);
      out << row;
    }
  }
}

}  // namespace bdsde
