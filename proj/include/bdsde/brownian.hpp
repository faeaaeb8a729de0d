#pragma once

#include <cstdint>
#include <vector>

namespace bdsde {

/// Uniform partition of [0, horizon] into n_steps intervals.
struct TimeGrid {
  int n_steps = 0;
  double horizon = 0.0;
  double dt = 0.0;

  double time_at(int i) const { return i * dt; }
};

TimeGrid make_time_grid(int n_steps, double horizon);

/// One sampled realization of the driving noise on a time grid.
/// cumulative[0] = 0 and cumulative[i+1] = cumulative[i] + increments[i];
/// b_T is the terminal value cumulative[n].
struct BrownianPath {
  std::vector<double> increments;
  std::vector<double> cumulative;
  double b_T = 0.0;
};

/// Samples increments as independent Normal(0, dt) draws from a counter-based
/// stream keyed by `seed` (splitmix64 outputs mapped through the inverse
/// normal CDF). Identical (grid, seed) gives a bit-identical path, and the
/// stream for one seed never depends on evaluation order.
BrownianPath sample_path(const TimeGrid& grid, std::uint64_t seed);

/// Sums consecutive fine increments to produce the same trajectory on a
/// coarser grid. fine.increments.size() must be a multiple of coarse.n_steps.
BrownianPath coarsen_path(const BrownianPath& fine, const TimeGrid& coarse);

/// Stream key for Monte Carlo sample k under a base seed. Documented mixing:
/// splitmix64(splitmix64(base_seed) + k), so parallel execution order never
/// changes any sample's draws.
std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t sample_index);

/// splitmix64 scramble of x (finalizer of the splitmix64 generator).
std::uint64_t splitmix64(std::uint64_t x);

/// Inverse standard normal CDF: Acklam's rational approximation polished by
/// one Halley step against erfc, giving ~1e-15 absolute accuracy.
double normal_quantile(double p);

/// index-th standard normal draw of the counter-based stream keyed by `key`;
/// the same (key, index) always yields the same value.
double counter_normal(std::uint64_t key, std::uint64_t index);

}  // namespace bdsde
