#include "bdsde/brownian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bdsde {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Counter-mode splitmix64: the i-th output of the stream keyed by `key`.
std::uint64_t stream_at(std::uint64_t key, std::uint64_t i) {
  return splitmix64(key + (i + 1) * kGolden);
}

// Uniform in the open interval (0, 1), 53-bit resolution.
double to_unit(std::uint64_t r) {
  return (static_cast<double>(r >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t sample_index) {
  return splitmix64(splitmix64(base_seed) + sample_index);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must be in (0, 1)");
  }

  // Acklam's rational approximation.
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley refinement against the erfc-based CDF.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

double counter_normal(std::uint64_t key, std::uint64_t index) {
  return normal_quantile(to_unit(stream_at(key, index)));
}

TimeGrid make_time_grid(int n_steps, double horizon) {
  if (n_steps < 1) {
    throw std::invalid_argument("make_time_grid: n_steps must be positive");
  }
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("make_time_grid: horizon must be positive");
  }
  TimeGrid grid;
  grid.n_steps = n_steps;
  grid.horizon = horizon;
  grid.dt = horizon / n_steps;
  return grid;
}

BrownianPath sample_path(const TimeGrid& grid, std::uint64_t seed) {
  const int n = grid.n_steps;
  BrownianPath path;
  path.increments.resize(n);
  path.cumulative.resize(n + 1);
  path.cumulative[0] = 0.0;
  const double sqrt_dt = std::sqrt(grid.dt);
  for (int i = 0; i < n; ++i) {
    const double u = to_unit(stream_at(seed, static_cast<std::uint64_t>(i)));
    path.increments[i] = normal_quantile(u) * sqrt_dt;
    path.cumulative[i + 1] = path.cumulative[i] + path.increments[i];
  }
  path.b_T = path.cumulative[n];
  return path;
}

BrownianPath coarsen_path(const BrownianPath& fine, const TimeGrid& coarse) {
  const int n_fine = static_cast<int>(fine.increments.size());
  const int n = coarse.n_steps;
  if (n <= 0 || n_fine % n != 0) {
    throw std::invalid_argument("coarsen_path: fine step count " +
                                std::to_string(n_fine) +
                                " is not a multiple of coarse step count " +
                                std::to_string(n));
  }
  const int factor = n_fine / n;
  BrownianPath path;
  path.increments.resize(n);
  path.cumulative.resize(n + 1);
  path.cumulative[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = 0; k < factor; ++k) {
      sum += fine.increments[i * factor + k];
    }
    path.increments[i] = sum;
    path.cumulative[i + 1] = path.cumulative[i] + sum;
  }
  path.b_T = path.cumulative[n];
  return path;
}

}  // namespace bdsde
