#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdsde {

/// Gauss-Hermite rule for the weight function exp(-u^2) on the real line.
/// Nodes are the roots of the physicists' Hermite polynomial of degree
/// `order`; weights are positive and sum to sqrt(pi). The rule integrates
/// polynomials of degree <= 2*order - 1 exactly.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;    // strictly increasing, symmetric about 0
  std::vector<double> weights;  // positive, sum to sqrt(pi)
};

/// Builds the q-point Gauss-Hermite rule, 1 <= q <= 64. Roots are located by
/// Newton iteration on the orthonormal Hermite recurrence (tolerance 1e-14,
/// at most 100 iterations per root); nothing is table-driven.
QuadratureRule hermite_rule(int q);

namespace detail {

inline constexpr double kInvSqrtPi = 0.5641895835477562869480795;

struct KernelSums {
  double mean = 0.0;     // ~ E[h(x + dW)]
  double mean_dw = 0.0;  // ~ E[h(x + dW) * dW]
};

/// One sweep over the probe points x + sqrt(2*dt)*a_j accumulating both
/// Gaussian kernels. This is the single source of the probe and weight
/// arithmetic; every caller (public kernels, solver loops) goes through it so
/// results are bit-identical across call sites.
template <class H>
KernelSums gh_sums(H&& h, double x, double dt, const QuadratureRule& rule) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("gauss-hermite kernel: dt must be positive");
  }
  const double c = std::sqrt(2.0 * dt);
  double m = 0.0;
  double md = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double probe = x + c * rule.nodes[j];
    const double hv = h(probe);
    if (!std::isfinite(hv)) {
      throw std::domain_error(
          "gauss-hermite kernel: integrand returned a non-finite value at probe x=" +
          std::to_string(probe));
    }
    m += rule.weights[j] * hv;
    md += (rule.weights[j] * (c * rule.nodes[j])) * hv;
  }
  return {m * kInvSqrtPi, md * kInvSqrtPi};
}

}  // namespace detail

/// E[h(x + dW)] with dW ~ Normal(0, dt), evaluated as
/// (1/sqrt(pi)) sum_j w_j h(x + sqrt(2*dt) a_j).
/// Exact when h is a polynomial of degree <= 2q-1.
double conditional_mean(const std::function<double(double)>& h, double x,
                        double dt, const QuadratureRule& rule);

/// E[h(x + dW) * dW], evaluated as
/// (1/sqrt(pi)) sum_j w_j sqrt(2*dt) a_j h(x + sqrt(2*dt) a_j).
/// The 1/dt factor needed for Z-type updates is left to the caller.
double conditional_mean_times_dw(const std::function<double(double)>& h,
                                 double x, double dt,
                                 const QuadratureRule& rule);

}  // namespace bdsde
