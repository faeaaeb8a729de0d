#include "bdsde/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bdsde {

SpaceGrid build_grid(double center, double radius, int count) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("build_grid: radius must be positive");
  }
  if (count < 5 || count % 2 == 0) {
    throw std::invalid_argument("build_grid: count must be an odd integer >= 5, got " +
                                std::to_string(count));
  }
  SpaceGrid grid;
  grid.center = center;
  grid.radius = radius;
  grid.count = count;
  grid.nodes.resize(count);
  const int mid = (count - 1) / 2;
  const double h = 2.0 * radius / (count - 1);
  for (int j = 0; j < count; ++j) {
    grid.nodes[j] = center + (j - mid) * h;  // center lands on a node exactly
  }
  return grid;
}

double interpolate(std::span<const double> values, const SpaceGrid& grid,
                   double x) {
  const int n = grid.count;
  if (static_cast<int>(values.size()) != n) {
    throw std::invalid_argument("interpolate: value array length " +
                                std::to_string(values.size()) +
                                " does not match grid count " + std::to_string(n));
  }
  if (x <= grid.nodes.front()) return values.front();
  if (x >= grid.nodes.back()) return values.back();

  const double h = grid.spacing();
  const double s = (x - grid.nodes.front()) / h;

  // Probe points sitting on a node return the nodal value exactly.
  const int near = static_cast<int>(std::lround(s));
  if (near >= 0 && near < n && x == grid.nodes[near]) return values[near];

  int cell = static_cast<int>(s);
  cell = std::clamp(cell, 0, n - 2);
  const int j0 = std::clamp(cell - 1, 0, n - 4);

  // Cubic Lagrange basis on the stencil {j0, .., j0+3}, local coordinate
  // t = (x - node[j0]) / h in (0, 3).
  const double t = (x - grid.nodes[j0]) / h;
  const double t1 = t - 1.0;
  const double t2 = t - 2.0;
  const double t3 = t - 3.0;
  const double w0 = -t1 * t2 * t3 / 6.0;
  const double w1 = t * t2 * t3 / 2.0;
  const double w2 = -t * t1 * t3 / 2.0;
  const double w3 = t * t1 * t2 / 6.0;
  return w0 * values[j0] + w1 * values[j0 + 1] + w2 * values[j0 + 2] +
         w3 * values[j0 + 3];
}

}  // namespace bdsde
