#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace flatneck {

struct RadialGridSpec {
  double r_min = 0.0;     // first node; 0 includes the axis
  double r_max = 1.0;
  double r0 = 0.25;
  double epsilon = 1e-2;
  int count = 400;        // requested node count (approximate, +/- a few)
  double beta = 0.10;     // spacing growth rate away from the cluster points
  double transition_floor_scale = 0.125;  // min spacing near r0 ~ scale * sqrt(eps)
};

// Strictly increasing radial nodes. Graded generators cluster near r0
// (spacing floor ~ sqrt(eps)/8), near the axis, and mildly near r = 1,
// and always place r0/2, r0 and 1 as exact nodes.
class RadialGrid {
 public:
  explicit RadialGrid(std::vector<double> nodes);
  static RadialGrid graded(const RadialGridSpec& spec);

  const std::vector<double>& nodes() const { return *nodes_; }
  std::size_t size() const { return nodes_->size(); }
  double front() const { return nodes_->front(); }
  double back() const { return nodes_->back(); }
  double operator[](std::size_t i) const { return (*nodes_)[i]; }

  // Index i with nodes[i] <= r <= nodes[i+1] (clamped at the ends).
  std::size_t interval_of(double r) const;
  bool has_node(double r, double tol = 1e-13) const;
  std::size_t index_of(double r, double tol = 1e-13) const;  // throws if absent

 private:
  std::shared_ptr<const std::vector<double>> nodes_;
};

// Sampled radial function with piecewise-cubic (Hermite) interpolation and
// composite 4-point Gauss quadrature. Immutable after construction; node
// evaluation reproduces the stored values exactly.
class RadialFunction {
 public:
  RadialFunction(RadialGrid grid, std::vector<double> values);

  template <class F>
  static RadialFunction sample(const RadialGrid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
    return RadialFunction(grid, std::move(v));
  }

  const RadialGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& node_slopes() const { return slopes_; }

  double operator()(double r) const;
  double derivative(double r) const;
  double integrate(double lo, double hi) const;

 private:
  RadialGrid grid_;
  std::vector<double> values_;
  std::vector<double> slopes_;  // three-point finite-difference slopes
};

// 4-point Gauss-Legendre applied per grid interval intersected with [lo, hi].
double gauss4_over_grid(const RadialGrid& grid, double lo, double hi,
                        const std::function<double(double)>& f);

}  // namespace flatneck
