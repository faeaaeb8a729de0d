#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace bdsde {

/// Coefficient bundle for a scalar terminal-value problem
///
///   Y_t = terminal(X_T, B_T) + int_t^T f(s, X_s, Y_s, Z_s, B_s, B_T) ds
///         - int_t^T Z_s dW_s + int_t^T g(s, X_s, Y_s, B_s, B_T) dB_s (backward),
///
/// with X_t = x0 + W_t and B an independent Brownian motion whose whole path
/// is known to the backward pass. Coefficients may reference the conditioning
/// value b_t and the terminal value b_T directly; drivers that do not need
/// them simply ignore those arguments.
struct Problem {
  /// Drift driver of the ds integral.
  std::function<double(double t, double x, double y, double z, double b_t,
                       double b_T)>
      f;

  /// Driver of the backward noise integral.
  std::function<double(double t, double x, double y, double b_t, double b_T)>
      g;

  /// Coefficient of the (dB^2 - dt)/2 correction in the backward-noise update.
  /// For a driver g(t, x, y) with no explicit b_t dependence this is the
  /// product g_y * g. When g references b_t directly, the consistent
  /// coefficient is the total derivative of g along the backward noise,
  /// g_y * g - dg/db_t, because the state and the conditioning value move
  /// together under one increment.
  std::function<double(double t, double x, double y, double b_t, double b_T)>
      g_y_g;

  /// Terminal condition at t = horizon.
  std::function<double(double x, double b_T)> terminal;

  /// Closed-form solutions when known; empty otherwise.
  std::function<double(double t, double x, double b_t, double b_T)> exact_y;
  std::function<double(double t, double x, double b_t, double b_T)> exact_z;

  double horizon = 1.0;
  double x0 = 0.0;

  bool has_exact() const {
    return static_cast<bool>(exact_y) && static_cast<bool>(exact_z);
  }
};

/// Test problem with solution Y_t = sin(t + W_t) - B_t/4 + B_T/4,
/// Z_t = cos(t + W_t).
Problem example_1();

/// Test problem with solution Y_t = sin(W_t) + t + B_t, Z_t = cos(W_t);
/// both drivers are quadratic in y.
Problem example_2();

/// Test problem with solution Y_t = t + W_t + B_t/2, Z_t = 1; y enters both
/// drivers through trigonometric terms.
Problem example_3();

/// Looks up a built-in problem: "example1", "example2" or "example3".
/// Throws std::invalid_argument for unknown names.
Problem problem_by_name(const std::string& name);

/// Central finite-difference fallback (step 1e-6 in y) for the correction
/// coefficient of problems that supply only g: returns g_y * g.
std::function<double(double, double, double, double, double)>
g_y_g_fallback(
    std::function<double(double, double, double, double, double)> g);

/// Randomized smoke check: coefficients must return finite values on a box of
/// plausible solver inputs, and exact_y must match terminal at t = horizon.
/// Throws std::invalid_argument with context on the first violation.
void validate_problem(const Problem& problem, std::uint64_t seed = 0);

}  // namespace bdsde
