// Command-line front end: runs a built-in problem (or a key-value config
// file) through the convergence harness and writes the report as a table or
// CSV.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bdsde/experiment.hpp"
#include "bdsde/solver.hpp"

namespace {

struct RunConfig {
  std::string problem = "example1";
  std::vector<int> n_list = {8, 16, 32, 64, 128};
  int samples = 300;
  std::uint64_t seed = 42;
  int gh_order = 8;
  int grid_count = 257;
  double grid_radius = 0.0;  // 0 = automatic
  std::string metric = "point-at-x0";
  std::string out_path;      // empty = stdout
  std::string format = "table";
  int threads = 0;
  std::string trace_path;
};

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) {
    throw std::invalid_argument("--n: expected a comma-separated list of step counts");
  }
  return out;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path + "'");
  }
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": expected key = value");
      }
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "problem") cfg.problem = value;
    else if (key == "n") cfg.n_list = parse_n_list(value);
    else if (key == "samples") cfg.samples = std::stoi(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "gh_order") cfg.gh_order = std::stoi(value);
    else if (key == "grid_count") cfg.grid_count = std::stoi(value);
    else if (key == "grid_radius") cfg.grid_radius = std::stod(value);
    else if (key == "metric") cfg.metric = value;
    else if (key == "out") cfg.out_path = value;
    else if (key == "format") cfg.format = value;
    else if (key == "threads") cfg.threads = std::stoi(value);
    else {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + key + "'");
    }
  }
}

int run(const RunConfig& cfg) {
  const bdsde::Problem problem = bdsde::problem_by_name(cfg.problem);
  bdsde::validate_problem(problem);

  bdsde::SolverConfig solver_config;
  solver_config.gh_order = cfg.gh_order;
  solver_config.grid_count = cfg.grid_count;
  solver_config.grid_radius = cfg.grid_radius;
  solver_config.threads = cfg.threads;

  const bdsde::ErrorMetric metric = bdsde::metric_from_string(cfg.metric);
  const bdsde::ConvergenceReport report = bdsde::convergence_study(
      problem, cfg.n_list, cfg.samples, cfg.seed, metric, solver_config);

  std::ostringstream body;
  if (cfg.format == "csv") {
    bdsde::write_csv(body, report);
  } else if (cfg.format == "table") {
    bdsde::write_table(body, report);
  } else {
    throw std::invalid_argument("unknown format '" + cfg.format +
                                "' (expected csv or table)");
  }

  if (cfg.out_path.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) {
      throw std::invalid_argument("cannot open output path '" + cfg.out_path + "'");
    }
    out << body.str();
    if (!out) {
      throw std::runtime_error("failed writing output to '" + cfg.out_path + "'");
    }
  }

  if (!cfg.trace_path.empty()) {
    // Debug dump: one backward solve (sample 0, finest partition), all levels.
    const bdsde::QuadratureRule rule = bdsde::hermite_rule(cfg.gh_order);
    const double radius = cfg.grid_radius > 0.0
                              ? cfg.grid_radius
                              : bdsde::auto_radius(problem.horizon, rule);
    const bdsde::SpaceGrid grid =
        bdsde::build_grid(problem.x0, radius, cfg.grid_count);
    const bdsde::TimeGrid time =
        bdsde::make_time_grid(cfg.n_list.back(), problem.horizon);
    const bdsde::BrownianPath path =
        bdsde::sample_path(time, bdsde::mix_seed(cfg.seed, 0));
    bdsde::SolveOptions options;
    options.keep_levels = true;
    const bdsde::SolveResult result =
        bdsde::solve_backward(problem, grid, rule, time, path, options);
    std::ofstream trace(cfg.trace_path, std::ios::binary);
    if (!trace) {
      throw std::invalid_argument("cannot open trace path '" + cfg.trace_path + "'");
    }
    bdsde::write_trace(trace, result, grid);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Splitting-scheme solver for backward doubly stochastic "
               "differential equations: Monte Carlo convergence studies over "
               "a partition refinement ladder"};

  RunConfig cfg;
  std::string n_text;
  std::string config_path;

  app.add_option("--problem", cfg.problem,
                 "Built-in problem name (example1, example2, example3)");
  app.add_option("--config", config_path,
                 "Key-value config file; flags given on the command line win");
  app.add_option("--n", n_text, "Comma-separated partition sizes (default 8,16,32,64,128)");
  app.add_option("--samples", cfg.samples, "Monte Carlo sample count (default 300)");
  app.add_option("--seed", cfg.seed, "Base seed (default 42)");
  app.add_option("--gh-order", cfg.gh_order, "Gauss-Hermite node count (default 8)");
  app.add_option("--grid-count", cfg.grid_count, "Spatial grid node count, odd (default 257)");
  app.add_option("--grid-radius", cfg.grid_radius,
                 "Spatial half-width; 0 selects the automatic default");
  app.add_option("--metric", cfg.metric, "Error metric: point-at-x0 | grid-l2");
  app.add_option("--out", cfg.out_path, "Output path (default stdout)");
  app.add_option("--format", cfg.format, "Output format: table | csv");
  app.add_option("--threads", cfg.threads, "Worker cap for the sample loop (0 = default)");
  app.add_option("--trace", cfg.trace_path,
                 "Write a columnar dump of all levels of one solve (sample 0, "
                 "finest N) to this path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) {
      RunConfig from_file = cfg;
      apply_config_file(config_path, from_file);
      // Precedence: file values first, then any flag passed explicitly.
      RunConfig merged = from_file;
      if (app.count("--problem")) merged.problem = cfg.problem;
      if (app.count("--samples")) merged.samples = cfg.samples;
      if (app.count("--seed")) merged.seed = cfg.seed;
      if (app.count("--gh-order")) merged.gh_order = cfg.gh_order;
      if (app.count("--grid-count")) merged.grid_count = cfg.grid_count;
      if (app.count("--grid-radius")) merged.grid_radius = cfg.grid_radius;
      if (app.count("--metric")) merged.metric = cfg.metric;
      if (app.count("--out")) merged.out_path = cfg.out_path;
      if (app.count("--format")) merged.format = cfg.format;
      if (app.count("--threads")) merged.threads = cfg.threads;
      if (app.count("--trace")) merged.trace_path = cfg.trace_path;
      if (app.count("--n")) merged.n_list = parse_n_list(n_text);
      cfg = merged;
    } else if (app.count("--n")) {
      cfg.n_list = parse_n_list(n_text);
    }
    return run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
