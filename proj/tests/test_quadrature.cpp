#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bdsde/quadrature.hpp"

using bdsde::conditional_mean;
using bdsde::conditional_mean_times_dw;
using bdsde::hermite_rule;
using bdsde::QuadratureRule;

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

// integral of u^k exp(-u^2) du over the real line
double hermite_monomial_integral(int k) {
  if (k % 2 == 1) return 0.0;
  // sqrt(pi) * (k-1)!! / 2^(k/2)
  double dfac = 1.0;
  for (int j = k - 1; j > 1; j -= 2) dfac *= j;
  return kSqrtPi * dfac / std::pow(2.0, k / 2.0);
}

double rule_monomial(const QuadratureRule& rule, int k) {
  double s = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    s += rule.weights[j] * std::pow(rule.nodes[j], k);
  }
  return s;
}

// E[(x + dW)^n] with dW ~ Normal(0, dt), from the binomial expansion and the
// Gaussian moments E[dW^(2m)] = (2m-1)!! dt^m.
double gaussian_shift_moment(int n, double x, double dt) {
  double total = 0.0;
  for (int j = 0; j <= n; j += 2) {
    double binom = 1.0;
    for (int i = 0; i < j; ++i) binom = binom * (n - i) / (i + 1);
    double dfac = 1.0;
    for (int m = j - 1; m > 1; m -= 2) dfac *= m;
    total += binom * dfac * std::pow(dt, j / 2.0) * std::pow(x, n - j);
  }
  return total;
}

}  // namespace

TEST_CASE("one-point rule integrates constants") {
  const QuadratureRule rule = hermite_rule(1);
  REQUIRE(rule.nodes.size() == 1);
  CHECK(rule.nodes[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(rule.weights[0] == doctest::Approx(1.7724538509).epsilon(1e-9));
}

TEST_CASE("two-point rule") {
  const QuadratureRule rule = hermite_rule(2);
  CHECK(rule.nodes[0] == doctest::Approx(-0.7071067812).epsilon(1e-9));
  CHECK(rule.nodes[1] == doctest::Approx(0.7071067812).epsilon(1e-9));
  CHECK(rule.weights[0] == doctest::Approx(0.8862269255).epsilon(1e-9));
  CHECK(rule.weights[1] == doctest::Approx(0.8862269255).epsilon(1e-9));
}

TEST_CASE("three-point rule") {
  const QuadratureRule rule = hermite_rule(3);
  CHECK(rule.nodes[0] == doctest::Approx(-1.2247448714).epsilon(1e-9));
  CHECK(rule.nodes[1] == 0.0);
  CHECK(rule.nodes[2] == doctest::Approx(1.2247448714).epsilon(1e-9));
  CHECK(rule.weights[0] == doctest::Approx(0.2954089752).epsilon(1e-9));
  CHECK(rule.weights[1] == doctest::Approx(1.1816359006).epsilon(1e-9));
  CHECK(rule.weights[2] == doctest::Approx(0.2954089752).epsilon(1e-9));
}

TEST_CASE("rule invariants for q up to 20") {
  for (int q = 1; q <= 20; ++q) {
    const QuadratureRule rule = hermite_rule(q);
    REQUIRE(static_cast<int>(rule.nodes.size()) == q);

    double wsum = 0.0;
    for (double w : rule.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(std::abs(wsum - kSqrtPi) <= 1e-12);

    for (int j = 1; j < q; ++j) {
      CHECK(rule.nodes[j] > rule.nodes[j - 1]);
      CHECK(std::abs(rule.nodes[j] + rule.nodes[q - 1 - j]) <= 1e-12);
    }

    for (int k = 0; k <= 2 * q - 1; ++k) {
      const double expected = hermite_monomial_integral(k);
      const double got = rule_monomial(rule, k);
      // odd powers cancel to zero; measure relative to the term magnitudes
      double term_scale = 0.0;
      for (int j = 0; j < q; ++j) {
        term_scale += rule.weights[j] * std::pow(std::abs(rule.nodes[j]), k);
      }
      const double scale = std::max({std::abs(expected), term_scale, 1.0});
      CHECK(std::abs(got - expected) <= 1e-10 * scale);
    }
  }
}

TEST_CASE("order out of range") {
  CHECK_THROWS_AS(hermite_rule(0), std::invalid_argument);
  CHECK_THROWS_AS(hermite_rule(-3), std::invalid_argument);
  CHECK_THROWS_AS(hermite_rule(65), std::invalid_argument);
}

TEST_CASE("conditional mean basics") {
  const QuadratureRule rule = hermite_rule(8);
  CHECK(conditional_mean([](double) { return 3.5; }, 0.7, 0.1, rule) ==
        doctest::Approx(3.5).epsilon(1e-13));
  CHECK(conditional_mean([](double u) { return u; }, 1.5, 0.25, rule) ==
        doctest::Approx(1.5).epsilon(1e-13));
  CHECK(conditional_mean([](double u) { return u * u; }, 0.0, 0.25, rule) ==
        doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("conditional mean times increment basics") {
  const QuadratureRule rule = hermite_rule(8);
  CHECK(std::abs(conditional_mean_times_dw([](double) { return 1.0; }, 0.3, 0.25,
                                           rule)) <= 1e-14);
  CHECK(conditional_mean_times_dw([](double u) { return u; }, 2.0, 0.25, rule) ==
        doctest::Approx(0.25).epsilon(1e-13));
  CHECK(conditional_mean_times_dw([](double u) { return u * u; }, 1.0, 0.25,
                                  rule) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("polynomial exactness against closed-form Gaussian moments") {
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> coeff(-2.0, 2.0);
  std::uniform_real_distribution<double> state(-3.0, 3.0);
  std::uniform_real_distribution<double> step(0.01, 1.0);

  for (int q : {2, 4, 8, 16}) {
    const QuadratureRule rule = hermite_rule(q);
    const int degree = 2 * q - 1;
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> c(degree + 1);
      for (double& v : c) v = coeff(rng);
      const double x = state(rng);
      const double dt = step(rng);

      auto poly = [&](double u) {
        double acc = 0.0;
        for (int m = degree; m >= 0; --m) acc = acc * u + c[m];
        return acc;
      };
      double expected = 0.0;
      for (int m = 0; m <= degree; ++m) {
        expected += c[m] * gaussian_shift_moment(m, x, dt);
      }
      const double got = conditional_mean(poly, x, dt, rule);
      const double scale = std::max(std::abs(expected), 1.0);
      CHECK(std::abs(got - expected) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("agreement with plain Monte Carlo for smooth non-polynomials") {
  const QuadratureRule rule = hermite_rule(8);
  const double x = 0.4;
  const double dt = 0.3;
  const int n_draws = 1000000;

  for (int which = 0; which < 2; ++which) {
    auto h = [which](double u) {
      return which == 0 ? std::sin(u) : std::exp(-u * u);
    };
    std::mt19937_64 rng(2024 + which);
    std::normal_distribution<double> normal(0.0, std::sqrt(dt));
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n_draws; ++i) {
      const double v = h(x + normal(rng));
      sum += v;
      sum_sq += v * v;
    }
    const double mc = sum / n_draws;
    const double var = sum_sq / n_draws - mc * mc;
    const double se = std::sqrt(var / n_draws);
    const double quad = conditional_mean(h, x, dt, rule);
    CHECK(std::abs(quad - mc) <= 4.0 * se);
  }
}

TEST_CASE("kernels are linear in the integrand") {
  const QuadratureRule rule = hermite_rule(8);
  auto h1 = [](double u) { return std::sin(u) + 0.3 * u; };
  auto h2 = [](double u) { return std::cos(2.0 * u); };
  const double a = 1.7, b = -0.45;
  auto combo = [&](double u) { return a * h1(u) + b * h2(u); };

  const double x = -0.8, dt = 0.22;
  const double lhs = conditional_mean(combo, x, dt, rule);
  const double rhs = a * conditional_mean(h1, x, dt, rule) +
                     b * conditional_mean(h2, x, dt, rule);
  CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
}

TEST_CASE("kernel rejects bad inputs") {
  const QuadratureRule rule = hermite_rule(4);
  CHECK_THROWS_AS(conditional_mean([](double) { return 1.0; }, 0.0, 0.0, rule),
                  std::invalid_argument);
  CHECK_THROWS_AS(conditional_mean([](double) { return 1.0; }, 0.0, -0.5, rule),
                  std::invalid_argument);

  auto bad = [](double u) {
    return u > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  try {
    conditional_mean(bad, 0.0, 0.25, rule);
    FAIL("expected a domain error");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("probe") != std::string::npos);
  }
}
