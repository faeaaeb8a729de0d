#pragma once

#include <span>
#include <vector>

namespace bdsde {

/// Uniform 1-D grid of an odd number of nodes centered on `center`, spanning
/// [center - radius, center + radius]. The center is always a grid node.
struct SpaceGrid {
  double center = 0.0;
  double radius = 0.0;
  int count = 0;
  std::vector<double> nodes;

  double spacing() const { return 2.0 * radius / (count - 1); }
  int center_index() const { return (count - 1) / 2; }
  double min_node() const { return nodes.front(); }
  double max_node() const { return nodes.back(); }
};

SpaceGrid build_grid(double center, double radius, int count);

/// Grid-sampled solution values at one time level: the predictor values
/// y_tilde, the corrected values y, and the gradient values z.
struct ValueLevel {
  std::vector<double> y_tilde;
  std::vector<double> y;
  std::vector<double> z;
  int time_index = 0;

  explicit ValueLevel(int node_count = 0, int time_idx = 0)
      : y_tilde(node_count, 0.0), y(node_count, 0.0), z(node_count, 0.0),
        time_index(time_idx) {}
};

/// Piecewise cubic Lagrange interpolation on the 4 grid nodes nearest x.
/// Outside [min node, max node] the boundary value is returned (constant
/// clamping). Values at grid nodes are reproduced exactly.
double interpolate(std::span<const double> values, const SpaceGrid& grid,
                   double x);

}  // namespace bdsde
