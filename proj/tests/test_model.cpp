#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "bdsde/model.hpp"

using bdsde::example_1;
using bdsde::example_2;
using bdsde::example_3;
using bdsde::g_y_g_fallback;
using bdsde::Problem;
using bdsde::problem_by_name;
using bdsde::validate_problem;

namespace {

struct Scene {
  double t, x, b_t, b_T;
};

std::vector<Scene> random_scenes(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  std::uniform_real_distribution<double> ub(-1.5, 1.5);
  std::vector<Scene> scenes(n);
  for (Scene& s : scenes) s = {ut(rng), ux(rng), ub(rng), ub(rng)};
  return scenes;
}

}  // namespace

TEST_CASE("first test problem") {
  const Problem p = example_1();
  CHECK(p.f(0.0, 0.0, 0.0, 0.0, 0.0, 1.0) == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(p.exact_z(0.0, 0.0, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  for (const Scene& s : random_scenes(32, 11)) {
    // terminal agrees with the solution at t = T
    const double yT = p.exact_y(p.horizon, s.x, s.b_T, s.b_T);
    CHECK(yT == doctest::Approx(p.terminal(s.x, s.b_T)).epsilon(1e-12));

    // along the solution the trigonometric parts collapse and only the
    // quadratic noise remainder is left
    const double y = p.exact_y(s.t, s.x, s.b_t, s.b_T);
    const double b = (s.b_t - s.b_T) / 8.0;
    const double g_manifold = 0.25 * (1.0 - b * b);
    CHECK(p.g(s.t, s.x, y, s.b_t, s.b_T) ==
          doctest::Approx(g_manifold).epsilon(1e-12));
    const double coeff_manifold =
        std::sin(s.t + s.x) * (0.5 * g_manifold - 0.125) + b / 16.0;
    CHECK(p.g_y_g(s.t, s.x, y, s.b_t, s.b_T) ==
          doctest::Approx(coeff_manifold).epsilon(1e-10));
  }
}

TEST_CASE("second test problem") {
  const Problem p = example_2();
  CHECK(p.exact_y(0.5, 0.0, 0.2, 0.0) == doctest::Approx(0.7).epsilon(1e-15));

  for (const Scene& s : random_scenes(32, 22)) {
    const double y = p.exact_y(s.t, s.x, s.b_t, s.b_T);
    // the squared term collapses on the solution: g = -(sin^2 + cos^2) = -1
    CHECK(p.g(s.t, s.x, y, s.b_t, s.b_T) == doctest::Approx(-1.0).epsilon(1e-12));
    // f - g = sin(x)/2 at matching arguments
    const double f = p.f(s.t, s.x, y, 0.7, s.b_t, s.b_T);
    const double g = p.g(s.t, s.x, y, s.b_t, s.b_T);
    CHECK(f - g == doctest::Approx(0.5 * std::sin(s.x)).epsilon(1e-12));
    CHECK(std::abs(p.g_y_g(s.t, s.x, y, s.b_t, s.b_T)) <= 1e-12);
    CHECK(p.exact_y(p.horizon, s.x, s.b_T, s.b_T) ==
          doctest::Approx(p.terminal(s.x, s.b_T)).epsilon(1e-12));
  }
}

TEST_CASE("third test problem") {
  const Problem p = example_3();
  for (const Scene& s : random_scenes(32, 33)) {
    CHECK(p.exact_z(s.t, s.x, s.b_t, s.b_T) == 1.0);

    // f at the solution with z = 1 is identically -1
    const double y = p.exact_y(s.t, s.x, s.b_t, s.b_T);
    CHECK(p.f(s.t, s.x, y, 1.0, s.b_t, s.b_T) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(p.g_y_g(s.t, s.x, y, s.b_t, s.b_T)) <= 1e-12);
  }
  // correction coefficient at the origin with y = 0
  CHECK(std::abs(p.g_y_g(0.0, 0.0, 0.0, 0.0, 0.0)) <= 1e-15);
}

TEST_CASE("problem lookup") {
  CHECK_NOTHROW(problem_by_name("example1"));
  CHECK_NOTHROW(problem_by_name("example2"));
  CHECK_NOTHROW(problem_by_name("example3"));
  CHECK_THROWS_AS(problem_by_name("example4"), std::invalid_argument);
  CHECK_THROWS_AS(problem_by_name(""), std::invalid_argument);
}

TEST_CASE("built-ins pass the smoke check") {
  CHECK_NOTHROW(validate_problem(example_1()));
  CHECK_NOTHROW(validate_problem(example_2()));
  CHECK_NOTHROW(validate_problem(example_3()));
}

TEST_CASE("smoke check catches broken problems") {
  Problem p = example_3();
  p.terminal = [](double x, double) { return std::sqrt(x); };  // NaN for x < 0
  CHECK_THROWS_AS(validate_problem(p), std::invalid_argument);

  Problem q = example_3();
  q.exact_y = [](double, double x, double, double) { return x; };  // wrong at T
  CHECK_THROWS_AS(validate_problem(q), std::invalid_argument);

  Problem r = example_3();
  r.g = nullptr;
  CHECK_THROWS_AS(validate_problem(r), std::invalid_argument);
}

TEST_CASE("finite-difference fallback matches an analytic product") {
  // driver without explicit noise dependence: g = sin(y) + 0.3 x
  auto g = [](double, double x, double y, double, double) {
    return std::sin(y) + 0.3 * x;
  };
  auto coeff = g_y_g_fallback(g);
  for (const Scene& s : random_scenes(24, 44)) {
    const double y = 0.8 * s.x;
    const double want = std::cos(y) * (std::sin(y) + 0.3 * s.x);
    const double got = coeff(s.t, s.x, y, s.b_t, s.b_T);
    CHECK(std::abs(got - want) <= 1e-5 * std::max(1.0, std::abs(want)));
  }
}
