#include "bdsde/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bdsde/solver.hpp"

namespace bdsde {

namespace {

struct SampleErrors {
  double e_y_tilde = 0.0;
  double e_y = 0.0;
  double e_z = 0.0;
};

double level_error(std::span<const double> values, const SpaceGrid& grid,
                   const std::function<double(double)>& exact,
                   ErrorMetric metric) {
  if (metric == ErrorMetric::point_at_x0) {
    const int c = grid.center_index();
    return std::abs(values[c] - exact(grid.nodes[c]));
  }
  // Spacing-weighted discrete L2 norm over the middle half of the grid.
  const double h = grid.spacing();
  double sum = 0.0;
  for (int k = 0; k < grid.count; ++k) {
    if (std::abs(grid.nodes[k] - grid.center) > grid.radius / 2.0) continue;
    const double d = values[k] - exact(grid.nodes[k]);
    sum += h * d * d;
  }
  return std::sqrt(sum);
}

SampleErrors sample_errors(const Problem& problem, const SpaceGrid& grid,
                           const QuadratureRule& rule, const TimeGrid& time,
                           const BrownianPath& path,
                           const SolveOptions& solve_options,
                           ErrorMetric metric) {
  const SolveResult result =
      solve_backward(problem, grid, rule, time, path, solve_options);
  const double b_T = path.b_T;
  // Comparison at t = 0 with B_0 = 0 and the sampled terminal value b_T.
  auto exact_y0 = [&](double x) { return problem.exact_y(0.0, x, 0.0, b_T); };
  auto exact_z0 = [&](double x) { return problem.exact_z(0.0, x, 0.0, b_T); };

  SampleErrors e;
  e.e_y_tilde = level_error(result.level0.y_tilde, grid, exact_y0, metric);
  e.e_y = level_error(result.level0.y, grid, exact_y0, metric);
  e.e_z = level_error(result.level0.z, grid, exact_z0, metric);
  return e;
}

using PathProvider = std::function<BrownianPath(int)>;

LevelErrors rmse_over_paths(const Problem& problem, const TimeGrid& time,
                            int samples, const PathProvider& provider,
                            ErrorMetric metric, const SolverConfig& config) {
  if (!problem.has_exact()) {
    throw std::invalid_argument("rmse: problem must supply exact_y and exact_z");
  }
  if (samples < 1) {
    throw std::invalid_argument("rmse: samples must be positive");
  }

  const QuadratureRule rule = hermite_rule(config.gh_order);
  const double radius = config.grid_radius > 0.0
                            ? config.grid_radius
                            : auto_radius(problem.horizon, rule);
  const SpaceGrid grid = build_grid(problem.x0, radius, config.grid_count);
  SolveOptions solve_options;
  solve_options.use_exact_terminal_z = config.use_exact_terminal_z;
  solve_options.corrector_at_next_time = config.corrector_at_next_time;

  std::vector<SampleErrors> errors(samples);
  std::exception_ptr failure = nullptr;
  int failed_sample = -1;

#ifdef _OPENMP
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int k = 0; k < samples; ++k) {
    try {
      errors[k] = sample_errors(problem, grid, rule, time, provider(k),
                                solve_options, metric);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      {
        if (!failure) {
          failure = std::current_exception();
          failed_sample = k;
        }
      }
    }
  }

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw std::runtime_error("rmse: sample " + std::to_string(failed_sample) +
                               " failed: " + e.what());
    }
  }

  // Fixed-order reduction: the result does not depend on the thread count.
  double s_yt = 0.0, s_y = 0.0, s_z = 0.0;
  for (int k = 0; k < samples; ++k) {
    s_yt += errors[k].e_y_tilde * errors[k].e_y_tilde;
    s_y += errors[k].e_y * errors[k].e_y;
    s_z += errors[k].e_z * errors[k].e_z;
  }

  LevelErrors out;
  out.n_steps = time.n_steps;
  out.dt = time.dt;
  out.err_y_tilde = std::sqrt(s_yt / samples);
  out.err_y = std::sqrt(s_y / samples);
  out.err_z = std::sqrt(s_z / samples);
  return out;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string to_string(ErrorMetric metric) {
  return metric == ErrorMetric::point_at_x0 ? "point-at-x0" : "grid-l2";
}

ErrorMetric metric_from_string(const std::string& name) {
  if (name == "point-at-x0") return ErrorMetric::point_at_x0;
  if (name == "grid-l2") return ErrorMetric::grid_l2;
  throw std::invalid_argument("unknown metric '" + name +
                              "' (expected point-at-x0 or grid-l2)");
}

double auto_radius(double horizon, const QuadratureRule& rule) {
  // The interior half of the domain must sit far enough from the boundary
  // that mass leaking past the clamped edge stays below the tightest
  // property tolerances; 6 standard deviations plus the probe fan does it.
  double a_max = 0.0;
  for (double a : rule.nodes) a_max = std::max(a_max, std::abs(a));
  return 6.0 * std::sqrt(horizon) + std::sqrt(2.0 * horizon) * a_max;
}

LevelErrors rmse(const Problem& problem, const TimeGrid& time, int samples,
                 std::uint64_t seed, ErrorMetric metric,
                 const SolverConfig& config) {
  auto provider = [&](int k) {
    return sample_path(time, mix_seed(seed, static_cast<std::uint64_t>(k)));
  };
  return rmse_over_paths(problem, time, samples, provider, metric, config);
}

ConvergenceReport convergence_study(const Problem& problem,
                                    const std::vector<int>& n_list,
                                    int samples, std::uint64_t seed,
                                    ErrorMetric metric,
                                    const SolverConfig& config) {
  if (n_list.empty()) {
    throw std::invalid_argument("convergence_study: n_list must be nonempty");
  }
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) {
      throw std::invalid_argument("convergence_study: n_list must be strictly increasing");
    }
  }

  const int n_fine = n_list.back();
  const TimeGrid fine_grid = make_time_grid(n_fine, problem.horizon);

  ConvergenceReport report;
  report.samples = samples;
  report.seed = seed;
  report.metric = metric;

  for (int n : n_list) {
    const TimeGrid level_grid = make_time_grid(n, problem.horizon);
    PathProvider provider;
    if (n_fine % n == 0) {
      // Common random numbers: every level sees the same underlying
      // trajectory, coarsened by increment summation.
      provider = [&, level_grid](int k) {
        const BrownianPath fine =
            sample_path(fine_grid, mix_seed(seed, static_cast<std::uint64_t>(k)));
        if (level_grid.n_steps == fine_grid.n_steps) return fine;
        return coarsen_path(fine, level_grid);
      };
    } else {
      provider = [&, level_grid](int k) {
        return sample_path(level_grid, mix_seed(seed, static_cast<std::uint64_t>(k)));
      };
    }
    report.levels.push_back(
        rmse_over_paths(problem, level_grid, samples, provider, metric, config));
  }

  auto rate_for = [&](double LevelErrors::*field) {
    std::vector<std::pair<double, double>> pts;
    for (const LevelErrors& lv : report.levels) {
      pts.emplace_back(lv.dt, lv.*field);
    }
    return fit_rate(pts);
  };
  report.cr_y_tilde = rate_for(&LevelErrors::err_y_tilde);
  report.cr_y = rate_for(&LevelErrors::err_y);
  report.cr_z = rate_for(&LevelErrors::err_z);
  return report;
}

OracleErrors oracle_rmse(const Problem& problem, const TimeGrid& time,
                         int samples, std::uint64_t seed, ErrorMetric metric,
                         const SolverConfig& config, std::uint64_t kernel_seed) {
  if (time.n_steps > 8) {
    throw std::invalid_argument("oracle_rmse: n_steps must be <= 8");
  }
  if (config.grid_count > 33) {
    throw std::invalid_argument("oracle_rmse: grid_count must be <= 33");
  }
  if (!problem.has_exact()) {
    throw std::invalid_argument("oracle_rmse: problem must supply exact solutions");
  }

  constexpr int kDraws = 100000;
  const QuadratureRule rule = hermite_rule(config.gh_order);
  const double radius = config.grid_radius > 0.0
                            ? config.grid_radius
                            : auto_radius(problem.horizon, rule);
  const SpaceGrid grid = build_grid(problem.x0, radius, config.grid_count);
  const int n = time.n_steps;
  const double dt = time.dt;
  const double sqrt_dt = std::sqrt(dt);

  std::vector<double> e_y(samples, 0.0), e_z(samples, 0.0);

#ifdef _OPENMP
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (int k = 0; k < samples; ++k) {
    const BrownianPath path =
        sample_path(time, mix_seed(seed, static_cast<std::uint64_t>(k)));
    SolveOptions solve_options;
    solve_options.use_exact_terminal_z = config.use_exact_terminal_z;
    ValueLevel next = terminal_level(problem, grid, path, solve_options);

    std::vector<double> zeta(kDraws);
    ValueLevel current(grid.count, 0);
    for (int i = n - 1; i >= 0; --i) {
      const double t_next = time.time_at(i + 1);
      const double b_next = path.cumulative[i + 1];
      const double db = path.increments[i];
      const std::uint64_t zkey = mix_seed(
          kernel_seed, static_cast<std::uint64_t>(k) * 64u + static_cast<std::uint64_t>(i));
      for (int m = 0; m < kDraws; ++m) {
        zeta[m] = counter_normal(zkey, static_cast<std::uint64_t>(m));
      }

      for (int node = 0; node < grid.count; ++node) {
        const double x = grid.nodes[node];
        double m_mean = 0.0, m_dw = 0.0;
        for (int m = 0; m < kDraws; ++m) {
          const double dw = sqrt_dt * zeta[m];
          const double xp = x + dw;
          const double y = interpolate(next.y, grid, xp);
          const double z = interpolate(next.z, grid, xp);
          const double h = y + dt * problem.f(t_next, xp, y, z, b_next, path.b_T);
          m_mean += h;
          m_dw += h * dw;
        }
        current.y_tilde[node] = m_mean / kDraws;
        current.z[node] = (m_dw / kDraws) / dt;
      }
      for (int node = 0; node < grid.count; ++node) {
        const double x = grid.nodes[node];
        const double xi = current.y_tilde[node];
        double m_g = 0.0, m_gg = 0.0;
        for (int m = 0; m < kDraws; ++m) {
          const double xp = x + sqrt_dt * zeta[m];
          m_g += problem.g(t_next, xp, xi, b_next, path.b_T);
          m_gg += problem.g_y_g(t_next, xp, xi, b_next, path.b_T);
        }
        current.y[node] =
            xi + db * (m_g / kDraws) + 0.5 * (db * db - dt) * (m_gg / kDraws);
      }
      current.time_index = i;
      std::swap(next, current);
    }

    auto exact_y0 = [&](double x) { return problem.exact_y(0.0, x, 0.0, path.b_T); };
    auto exact_z0 = [&](double x) { return problem.exact_z(0.0, x, 0.0, path.b_T); };
    e_y[k] = level_error(next.y, grid, exact_y0, metric);
    e_z[k] = level_error(next.z, grid, exact_z0, metric);
  }

  double s_y = 0.0, s_z = 0.0;
  for (int k = 0; k < samples; ++k) {
    s_y += e_y[k] * e_y[k];
    s_z += e_z[k] * e_z[k];
  }
  OracleErrors out;
  out.err_y = std::sqrt(s_y / samples);
  out.err_z = std::sqrt(s_z / samples);
  return out;
}

std::optional<double> fit_rate(
    const std::vector<std::pair<double, double>>& dt_err) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [dt, err] : dt_err) {
    if (err > 1e-10 && dt > 0.0) pts.emplace_back(std::log(dt), std::log(err));
  }
  if (pts.size() < 2) return std::nullopt;

  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

void write_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "N,dt,err_ytilde,err_y,err_z\n";
  char row[256];
  for (const LevelErrors& lv : report.levels) {
    std::snprintf(row, sizeof(row), "%d,%.17g,%.17g,%.17g,%.17g\n", lv.n_steps,
                  lv.dt, lv.err_y_tilde, lv.err_y, lv.err_z);
    out << row;
  }
  if (report.cr_y_tilde || report.cr_y || report.cr_z) {
    auto val = [](const std::optional<double>& r) {
      return r ? *r : std::numeric_limits<double>::quiet_NaN();
    };
    std::snprintf(row, sizeof(row), "# CR,%.17g,%.17g,%.17g\n",
                  val(report.cr_y_tilde), val(report.cr_y), val(report.cr_z));
    out << row;
  }
}

ConvergenceReport parse_csv(std::istream& in) {
  ConvergenceReport report;
  std::string line;
  if (!std::getline(in, line) || line != "N,dt,err_ytilde,err_y,err_z") {
    throw std::runtime_error("parse_csv: missing or malformed header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# CR,", 0) == 0) {
      std::istringstream ss(line.substr(5));
      double r[3];
      char comma;
      ss >> r[0] >> comma >> r[1] >> comma >> r[2];
      if (!ss.fail()) {
        auto opt = [](double v) -> std::optional<double> {
          if (std::isnan(v)) return std::nullopt;
          return v;
        };
        report.cr_y_tilde = opt(r[0]);
        report.cr_y = opt(r[1]);
        report.cr_z = opt(r[2]);
      }
      continue;
    }
    LevelErrors lv;
    if (std::sscanf(line.c_str(), "%d,%lg,%lg,%lg,%lg", &lv.n_steps, &lv.dt,
                    &lv.err_y_tilde, &lv.err_y, &lv.err_z) != 5) {
      throw std::runtime_error("parse_csv: malformed row: " + line);
    }
    report.levels.push_back(lv);
  }
  return report;
}

void write_table(std::ostream& out, const ConvergenceReport& report) {
  char row[256];
  std::snprintf(row, sizeof(row), "%-12s  %-14s  %-14s  %-14s\n", "Partition",
                "err_Ytilde", "err_Y", "err_Z");
  out << row;
  for (const LevelErrors& lv : report.levels) {
    char label[32];
    if (is_power_of_two(lv.n_steps)) {
      int exp = 0;
      for (int v = lv.n_steps; v > 1; v >>= 1) ++exp;
      std::snprintf(label, sizeof(label), "N = 2^%d", exp);
    } else {
      std::snprintf(label, sizeof(label), "N = %d", lv.n_steps);
    }
    std::snprintf(row, sizeof(row), "%-12s  %-14.4e  %-14.4e  %-14.4e\n", label,
                  lv.err_y_tilde, lv.err_y, lv.err_z);
    out << row;
  }
  if (report.cr_y_tilde || report.cr_y || report.cr_z) {
    auto cell = [](const std::optional<double>& r, char* buf, std::size_t len) {
      if (r) {
        std::snprintf(buf, len, "%.2f", *r);
      } else {
        std::snprintf(buf, len, "--");
      }
    };
    char c1[16], c2[16], c3[16];
    cell(report.cr_y_tilde, c1, sizeof(c1));
    cell(report.cr_y, c2, sizeof(c2));
    cell(report.cr_z, c3, sizeof(c3));
    std::snprintf(row, sizeof(row), "%-12s  %-14s  %-14s  %-14s\n", "CR", c1, c2,
                  c3);
    out << row;
  }
}

}  // namespace bdsde
