#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "bdsde/brownian.hpp"
#include "bdsde/model.hpp"
#include "bdsde/quadrature.hpp"
#include "bdsde/spatial.hpp"

namespace bdsde {

struct SolveOptions {
  /// Keep every intermediate level (trace mode). Default keeps only level 0.
  bool keep_levels = false;
  /// Run the per-node loops of each level under OpenMP.
  bool parallel_nodes = false;
  /// Seed the terminal gradient from exact_z instead of the central finite
  /// difference of the terminal condition.
  bool use_exact_terminal_z = false;
  /// Evaluate the corrector drivers at t_{i+1} instead of t_i. The predictor
  /// value fed into them already sits at drift level t_i, so the default
  /// (t_i) keeps the driver arguments consistent with their y argument;
  /// see step_sde.
  bool corrector_at_next_time = false;
};

struct SolveResult {
  ValueLevel level0{0, 0};
  /// All levels in time order (index i = time level i); only filled when
  /// SolveOptions::keep_levels is set.
  std::vector<ValueLevel> levels;
};

/// Terminal values on the grid: y = y_tilde = terminal(x, b_T); z is the
/// central finite difference of the terminal condition (one-sided at the two
/// boundary nodes) unless exact_z is requested via the options.
ValueLevel terminal_level(const Problem& problem, const SpaceGrid& grid,
                          const BrownianPath& path,
                          const SolveOptions& options = {});

/// Predictor half-step from level i+1 to level i. For every grid node x it
/// forms h(x') = Y(x') + dt f(t_next, x', Y(x'), Z(x'), b_next, b_T) with Y, Z
/// interpolated from `next`, then
///   y_tilde(x) = E[h(x + dW)],   z(x) = E[h(x + dW) dW] / dt.
void step_bsde(const Problem& problem, const SpaceGrid& grid,
               const QuadratureRule& rule, double dt, double t_next,
               double b_next, double b_T, const ValueLevel& next,
               std::span<double> y_tilde_out, std::span<double> z_out,
               bool parallel = false);

/// Corrector half-step applying the backward-noise update. For every node x
/// with xi = y_tilde(x):
///   y(x) = xi + db E[g(t_eval, x + dW, xi)]
///             + (db^2 - dt)/2 E[g_y_g(t_eval, x + dW, xi)].
/// db is known to the conditional expectation, so only the state dependence
/// of the drivers is integrated.
///
/// solve_backward passes t_eval = t_i by default: the predictor value xi
/// already sits at drift level t_i while carrying the level i+1 noise value
/// b_next, and drivers that reference their arguments jointly (for example
/// through y - t - b_t) stay consistent only under that pairing. Evaluating
/// at t_{i+1} instead shifts the driver against its own y argument by O(dt),
/// which both enlarges the error constant and, for drivers with superlinear
/// growth, seeds far-field instabilities at coarse partitions.
///
/// update_cap > 0 clamps the per-node update to [-update_cap, update_cap].
/// solve_backward sizes it so on-scale dynamics never reach it and only the
/// runaway branch of a superlinear driver is truncated. update_cap == 0
/// disables the clamp.
void step_sde(const Problem& problem, const SpaceGrid& grid,
              const QuadratureRule& rule, double dt, double t_eval,
              double b_next, double b_T, std::span<const double> y_tilde,
              double db, std::span<double> y_out, bool parallel = false,
              double update_cap = 0.0);

/// Full backward recursion: terminal level, then for i = N-1 down to 0 the
/// predictor and corrector half-steps. Throws std::runtime_error with level
/// and node context if any value turns non-finite.
SolveResult solve_backward(const Problem& problem, const SpaceGrid& grid,
                           const QuadratureRule& rule, const TimeGrid& time,
                           const BrownianPath& path,
                           const SolveOptions& options = {});

/// Plain Euler recursion for the g == 0 case: identical to solve_backward but
/// the corrector half-step is skipped entirely. Used to pin down that the
/// full pipeline degenerates to the pure backward equation.
SolveResult solve_backward_bsde(const Problem& problem, const SpaceGrid& grid,
                                const QuadratureRule& rule,
                                const TimeGrid& time, const BrownianPath& path,
                                const SolveOptions& options = {});

/// Columnar dump of all levels: "time_index node y_tilde y z", one row per
/// grid node per level. Requires a result produced with keep_levels.
void write_trace(std::ostream& out, const SolveResult& result,
                 const SpaceGrid& grid);

}  // namespace bdsde
