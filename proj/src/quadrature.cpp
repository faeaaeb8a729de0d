#include "bdsde/quadrature.hpp"

#include <cmath>
#include <cstdlib>

namespace bdsde {

namespace {

// pi^(-1/4), the leading coefficient of the orthonormal Hermite recurrence.
constexpr double kPiToMinusQuarter = 0.7511255444649424828587;

}  // namespace

QuadratureRule hermite_rule(int q) {
  if (q < 1 || q > 64) {
    throw std::invalid_argument("hermite_rule: order must be in [1, 64], got " +
                                std::to_string(q));
  }

  QuadratureRule rule;
  rule.order = q;
  rule.nodes.assign(q, 0.0);
  rule.weights.assign(q, 0.0);

  const double tol = 1e-14;
  const int max_iter = 100;
  const int half = (q + 1) / 2;

  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    // Initial guesses for the roots in decreasing order (largest first),
    // standard asymptotic seeds refined by Newton below.
    if (i == 0) {
      z = std::sqrt(2.0 * q + 1.0) - 1.85575 * std::pow(2.0 * q + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(q), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[q - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[q - 2];
    } else {
      z = 2.0 * z - rule.nodes[q - i + 1];
    }

    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
      // Orthonormal Hermite recurrence: p_{j+1}(z) = z sqrt(2/(j+1)) p_j(z)
      //                                            - sqrt(j/(j+1)) p_{j-1}(z).
      double p1 = kPiToMinusQuarter;
      double p2 = 0.0;
      for (int j = 0; j < q; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * q) * p2;  // derivative of the orthonormal p_q at z
      const double z_old = z;
      z = z_old - p1 / pp;
      if (std::abs(z - z_old) <= tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw std::runtime_error("hermite_rule: Newton iteration failed to converge for order " +
                               std::to_string(q));
    }

    // Roots stored in increasing order; weights are symmetric.
    rule.nodes[q - 1 - i] = z;
    rule.nodes[i] = -z;
    rule.weights[q - 1 - i] = 2.0 / (pp * pp);
    rule.weights[i] = rule.weights[q - 1 - i];
  }

  if (q % 2 == 1) {
    rule.nodes[q / 2] = 0.0;  // the middle root is exactly zero
  }
  return rule;
}

double conditional_mean(const std::function<double(double)>& h, double x,
                        double dt, const QuadratureRule& rule) {
  return detail::gh_sums(h, x, dt, rule).mean;
}

double conditional_mean_times_dw(const std::function<double(double)>& h,
                                 double x, double dt,
                                 const QuadratureRule& rule) {
  return detail::gh_sums(h, x, dt, rule).mean_dw;
}

}  // namespace bdsde
