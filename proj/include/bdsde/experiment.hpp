#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bdsde/brownian.hpp"
#include "bdsde/model.hpp"
#include "bdsde/quadrature.hpp"
#include "bdsde/spatial.hpp"

namespace bdsde {

enum class ErrorMetric {
  point_at_x0,  // per-sample scalar error at the grid center x = x0
  grid_l2,      // discrete L2 norm (spacing-weighted) over the middle half
};

std::string to_string(ErrorMetric metric);
ErrorMetric metric_from_string(const std::string& name);

/// Numerical parameters shared by every run.
struct SolverConfig {
  int gh_order = 8;
  int grid_count = 257;
  /// Half-width of the spatial domain; 0 selects the automatic default
  /// 6 sqrt(T) + sqrt(2 T) max|a_j|.
  double grid_radius = 0.0;
  bool use_exact_terminal_z = false;
  /// See SolveOptions::corrector_at_next_time.
  bool corrector_at_next_time = false;
  /// Worker cap for the Monte Carlo sample loop; 0 uses the OpenMP default.
  int threads = 0;
};

double auto_radius(double horizon, const QuadratureRule& rule);

struct LevelErrors {
  int n_steps = 0;
  double dt = 0.0;
  double err_y_tilde = 0.0;
  double err_y = 0.0;
  double err_z = 0.0;
};

struct ConvergenceReport {
  std::vector<LevelErrors> levels;
  std::optional<double> cr_y_tilde;
  std::optional<double> cr_y;
  std::optional<double> cr_z;
  int samples = 0;
  std::uint64_t seed = 0;
  ErrorMetric metric = ErrorMetric::point_at_x0;
};

/// Root mean square errors at t = 0 over `samples` independent noise paths.
/// Sample k uses the stream mix_seed(seed, k); the reduction over samples is
/// a fixed-order sum, so results are identical under any thread count.
/// Requires exact_y and exact_z on the problem.
LevelErrors rmse(const Problem& problem, const TimeGrid& time, int samples,
                 std::uint64_t seed, ErrorMetric metric,
                 const SolverConfig& config = {});

/// Runs rmse at every partition in n_list (strictly increasing) and fits
/// convergence rates by least squares on log(error) vs log(dt). All levels
/// see the same underlying trajectories: whenever the finest step count is a
/// multiple of a coarser one, the coarse path is the summation coarsening of
/// the finest-level increments.
ConvergenceReport convergence_study(const Problem& problem,
                                    const std::vector<int>& n_list,
                                    int samples, std::uint64_t seed,
                                    ErrorMetric metric,
                                    const SolverConfig& config = {});

struct OracleErrors {
  double err_y = 0.0;
  double err_z = 0.0;
};

/// Same pipeline with the Gauss-Hermite kernels replaced by dense plain
/// Monte Carlo conditional expectations (1e5 draws per expectation), used to
/// validate the quadrature configuration. Desk-scale guard: n_steps <= 8 and
/// grid_count <= 33. kernel_seed keys the kernel draw streams so independent
/// replicates can estimate the oracle's own standard error.
OracleErrors oracle_rmse(const Problem& problem, const TimeGrid& time,
                         int samples, std::uint64_t seed,
                         ErrorMetric metric = ErrorMetric::point_at_x0,
                         const SolverConfig& config = {},
                         std::uint64_t kernel_seed = 1);

/// Least-squares slope of log(err) against log(dt). Levels with err < 1e-10
/// are excluded; fewer than two usable levels yields no rate.
std::optional<double> fit_rate(const std::vector<std::pair<double, double>>& dt_err);

/// CSV with header "N,dt,err_ytilde,err_y,err_z", one row per level, and a
/// trailing "# CR,..." comment when rates are defined. Values are printed
/// with enough digits to round-trip exactly.
void write_csv(std::ostream& out, const ConvergenceReport& report);

/// Parses the write_csv format back (used for round-trip checks).
ConvergenceReport parse_csv(std::istream& in);

/// Human-readable aligned table with one row per partition and a CR row.
void write_table(std::ostream& out, const ConvergenceReport& report);

}  // namespace bdsde
