#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "bdsde/spatial.hpp"

using bdsde::build_grid;
using bdsde::interpolate;
using bdsde::SpaceGrid;

TEST_CASE("grid construction") {
  const SpaceGrid g1 = build_grid(0.0, 1.0, 5);
  const std::vector<double> want1 = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (int j = 0; j < 5; ++j) CHECK(g1.nodes[j] == doctest::Approx(want1[j]).epsilon(1e-15));

  const SpaceGrid g2 = build_grid(2.0, 0.5, 5);
  const std::vector<double> want2 = {1.5, 1.75, 2.0, 2.25, 2.5};
  for (int j = 0; j < 5; ++j) CHECK(g2.nodes[j] == doctest::Approx(want2[j]).epsilon(1e-15));

  const SpaceGrid g3 = build_grid(0.0, 6.0, 241);
  CHECK(g3.spacing() == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(g3.nodes[120] == 0.0);  // the center is a node, exactly

  // uniform spacing within 1e-12
  for (int j = 1; j < g3.count; ++j) {
    CHECK(std::abs((g3.nodes[j] - g3.nodes[j - 1]) - g3.spacing()) <= 1e-12);
  }
}

TEST_CASE("grid argument validation") {
  CHECK_THROWS_AS(build_grid(0.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.0, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(0.0, -1.0, 5), std::invalid_argument);
}

TEST_CASE("cubic polynomials are reproduced") {
  const SpaceGrid grid = build_grid(0.5, 3.0, 41);
  auto p = [](double x) { return x * x * x - 2.0 * x; };
  std::vector<double> values(grid.count);
  for (int j = 0; j < grid.count; ++j) values[j] = p(grid.nodes[j]);

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> inside(grid.min_node() + 0.1,
                                                grid.max_node() - 0.1);
  for (int rep = 0; rep < 50; ++rep) {
    const double x = inside(rng);
    CHECK(std::abs(interpolate(values, grid, x) - p(x)) <= 1e-10);
  }
}

TEST_CASE("nodal values are returned exactly") {
  const SpaceGrid grid = build_grid(-1.0, 2.0, 21);
  std::vector<double> values(grid.count);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (double& v : values) v = u(rng);
  for (int j = 0; j < grid.count; ++j) {
    CHECK(interpolate(values, grid, grid.nodes[j]) == values[j]);
  }
}

TEST_CASE("outside the domain the boundary value is used") {
  const SpaceGrid grid = build_grid(0.0, 1.0, 9);
  std::vector<double> values(grid.count);
  for (int j = 0; j < grid.count; ++j) values[j] = std::sin(grid.nodes[j]);
  CHECK(interpolate(values, grid, grid.max_node() + 1.0) == values.back());
  CHECK(interpolate(values, grid, grid.min_node() - 2.5) == values.front());
}

TEST_CASE("length mismatch is rejected") {
  const SpaceGrid grid = build_grid(0.0, 1.0, 9);
  std::vector<double> wrong(8, 0.0);
  CHECK_THROWS_AS(interpolate(wrong, grid, 0.3), std::invalid_argument);
}

TEST_CASE("random cubics at random interior points") {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> coeff(-3.0, 3.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double c0 = coeff(rng), c1 = coeff(rng), c2 = coeff(rng), c3 = coeff(rng);
    auto p = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
    const SpaceGrid grid = build_grid(coeff(rng), 2.5, 33);
    std::vector<double> values(grid.count);
    for (int j = 0; j < grid.count; ++j) values[j] = p(grid.nodes[j]);

    std::uniform_real_distribution<double> inside(grid.min_node(), grid.max_node());
    for (int i = 0; i < 100; ++i) {
      const double x = inside(rng);
      const double want = p(x);
      const double got = interpolate(values, grid, x);
      CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("interpolation is linear in the value array") {
  const SpaceGrid grid = build_grid(0.0, 2.0, 17);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v1(grid.count), v2(grid.count), combo(grid.count);
  for (int j = 0; j < grid.count; ++j) {
    v1[j] = u(rng);
    v2[j] = u(rng);
  }
  const double a = 0.7, b = -1.9;
  for (int j = 0; j < grid.count; ++j) combo[j] = a * v1[j] + b * v2[j];

  for (int i = 0; i < 40; ++i) {
    const double x = u(rng) * 2.0;
    const double lhs = interpolate(combo, grid, x);
    const double rhs = a * interpolate(v1, grid, x) + b * interpolate(v2, grid, x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("monotone data stays finite") {
  const SpaceGrid grid = build_grid(0.0, 1.0, 9);
  std::vector<double> values = {-4.0, -2.0, -1.5, -0.25, 0.0, 1.0, 1.5, 3.0, 9.0};
  for (double x = -1.2; x <= 1.2; x += 0.01) {
    CHECK(std::isfinite(interpolate(values, grid, x)));
  }
}
